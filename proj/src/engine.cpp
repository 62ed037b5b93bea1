#include "splitsim/engine.hpp"

#include <algorithm>
#include <charconv>

namespace splitsim {

namespace {

std::optional<int> parse_index(std::string_view text) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || v < 0) return std::nullopt;
  return v;
}

}  // namespace

std::string requirement_label(const RequirementId& r) {
  return std::string(1, side_char(r.side)) + ":" + std::to_string(r.e);
}

std::optional<RequirementId> parse_requirement_label(std::string_view text) {
  if (text.size() < 3 || text[1] != ':') return std::nullopt;
  if (text[0] != 'P' && text[0] != 'Q') return std::nullopt;
  auto e = parse_index(text.substr(2));
  if (!e) return std::nullopt;
  return RequirementId{text[0] == 'P' ? Side::P : Side::Q, *e};
}

int priority_order(const BlockId& block) {
  return 2 * block.index + (block.side == BlockSide::Upsilon ? 1 : 0);
}

BlockId block_at_order(int order) {
  return {order % 2 == 0 ? BlockSide::Lambda : BlockSide::Upsilon, order / 2};
}

std::string block_label(const BlockId& block) {
  return std::string(block.side == BlockSide::Lambda ? "L:" : "U:") + std::to_string(block.index);
}

std::optional<BlockId> parse_block_label(std::string_view text) {
  if (text.size() < 3 || text[1] != ':') return std::nullopt;
  if (text[0] != 'L' && text[0] != 'U') return std::nullopt;
  auto i = parse_index(text.substr(2));
  if (!i) return std::nullopt;
  return BlockId{text[0] == 'L' ? BlockSide::Lambda : BlockSide::Upsilon, *i};
}

bool threatens(int x, const BlockState& block) { return x <= block.restraint; }

PriorityAssignment::PriorityAssignment(int width)
    : lambda_(width), mu_(width), lambda_changed_(width, -1), mu_changed_(width, -1) {
  if (width < 1) throw std::invalid_argument("assignment width must be positive");
  for (int e = 0; e < width; ++e) lambda_[e] = mu_[e] = e;
}

int PriorityAssignment::block_of(Side side, int e) const {
  const auto& r = row(side);
  const int n = width();
  if (e < n) return r[e];
  return r[n - 1] + (e - (n - 1));
}

std::pair<int, int> PriorityAssignment::members(Side side, int i) const {
  const auto& r = row(side);
  const int n = width();
  if (i > r[n - 1]) {
    const int e = (n - 1) + (i - r[n - 1]);
    return {e, e};
  }
  auto lo = std::lower_bound(r.begin(), r.end(), i);
  auto hi = std::upper_bound(r.begin(), r.end(), i);
  return {static_cast<int>(lo - r.begin()), static_cast<int>(hi - r.begin()) - 1};
}

int PriorityAssignment::tail(Side side, int i) const {
  auto [first, last] = members(side, i);
  return first > last ? -1 : last;
}

Stage PriorityAssignment::last_changed(Side side, int e) const {
  const auto& r = side == Side::P ? lambda_changed_ : mu_changed_;
  return e < width() ? r[e] : -1;
}

void PriorityAssignment::apply(Side side, int i, int tail, Stage s) {
  auto& r = row(side);
  auto& changed = side == Side::P ? lambda_changed_ : mu_changed_;
  for (int j = tail + 1; j < width(); ++j) {
    const int next = j <= s ? i : i + (j - s);
    if (next > r[j])
      throw InvariantViolation(s, "assignment of " + std::string(1, side_char(side)) + std::to_string(j) +
                                      " would increase");
    if (next != r[j]) {
      r[j] = next;
      changed[j] = s;
    }
  }
}

RoutingDecision route_element(int x, const std::map<BlockId, BlockState>& blocks) {
  RoutingDecision decision;
  std::optional<BlockId> strongest;
  for (const auto& [id, state] : blocks) {
    if (!threatens(x, state)) continue;
    if (!strongest || priority_order(id) < priority_order(*strongest)) strongest = id;
  }
  if (!strongest) return decision;
  decision.threatened = strongest;
  if (strongest->side == BlockSide::Lambda) {
    decision.target = RouteTarget::A1;
    decision.initialize = BlockId{BlockSide::Upsilon, strongest->index};
  } else {
    decision.target = RouteTarget::A0;
    decision.initialize = BlockId{BlockSide::Lambda, strongest->index + 1};
  }
  return decision;
}

Construction::Construction(Horizon horizon, std::unique_ptr<Strategy> strategy)
    : horizon_(horizon),
      strategy_(std::move(strategy)),
      tracked_(strategy_->requirements()),
      assignment_(horizon.last() + 2) {
  std::sort(tracked_.begin(), tracked_.end());
}

BlockState& Construction::block(const BlockId& id) {
  auto [it, inserted] = blocks_.try_emplace(id);
  if (inserted) it->second.id = id;
  return it->second;
}

int Construction::restraint(const BlockId& id) const {
  auto it = blocks_.find(id);
  return it == blocks_.end() ? -1 : it->second.restraint;
}

BlockId Construction::block_of(const RequirementId& r) const {
  return {block_side_for(r.side), assignment_.block_of(r.side, r.e)};
}

void Construction::set_restraint(const BlockId& id, int value, Stage s) {
  BlockState& state = block(id);
  state.restraint = value;
  state.max_restraint = std::max(state.max_restraint, value);
  emit(TraceEvent(s, event_kind::kRestraintSet).set("block", block_label(id)).set("value", value));
}

void Construction::run_stage(Stage s, const Arrivals& arrivals) {
  if (s != next_stage_) throw InvariantViolation(s, "stages must run in order");
  if (!horizon_.contains_stage(s)) throw InvariantViolation(s, "stage beyond horizon");
  enumerate_arrivals(s, arrivals);
  if (s % 2 == 1) {
    if (arrivals.b) part_one(s, *arrivals.b);
  } else {
    if (arrivals.b) throw InvariantViolation(s, "B-arrival at an even stage");
    part_two(s);
  }
  strategy_->after_changes(*this, s);
  update_assignments(s, initiator_);
  initiator_.reset();
  ++next_stage_;
}

void Construction::enumerate_arrivals(Stage s, const Arrivals& arrivals) {
  for (Snapshot* snap : {&world_.b_now, &world_.c_now, &world_.d_now, &world_.a0_now, &world_.a1_now})
    snap->advance_to(s);
  auto enumerate = [&](EnumerationSchedule& sched, Snapshot& now, std::vector<int> elements) {
    std::sort(elements.begin(), elements.end());
    for (int x : elements) {
      if (!horizon_.contains_element(x))
        throw InvariantViolation(s, "element " + std::to_string(x) + " outside horizon");
      sched.add(s, x);
      now.insert(x);
      emit(TraceEvent(s, event_kind::kEnumerate)
               .set("element", x)
               .set("set", std::string(role_name(sched.role()))));
    }
  };
  if (arrivals.b) enumerate(world_.b, world_.b_now, {*arrivals.b});
  enumerate(world_.c, world_.c_now, arrivals.c);
  enumerate(world_.d, world_.d_now, arrivals.d);
}

void Construction::part_one(Stage s, int x) {
  const RoutingDecision decision = route_element(x, blocks_);
  TraceEvent ev(s, event_kind::kRoute);
  ev.set("element", x).set("target", decision.target == RouteTarget::A0 ? "A0" : "A1");
  if (decision.threatened) ev.set("block", block_label(*decision.threatened));
  emit(std::move(ev));
  if (decision.target == RouteTarget::A0) {
    world_.a0.add(s, x);
    world_.a0_now.insert(x);
  } else {
    world_.a1.add(s, x);
    world_.a1_now.insert(x);
  }
  if (decision.initialize) initialize_block(*decision.initialize, s, "route");
}

void Construction::part_two(Stage s) {
  // Blocks without a tracked requirement never act, so only those with one
  // are visited, in priority order, up to the block holding P_s or Q_s.
  const int stop = std::min(priority_order({BlockSide::Lambda, assignment_.block_of(Side::P, s)}),
                            priority_order({BlockSide::Upsilon, assignment_.block_of(Side::Q, s)}));
  std::map<int, std::vector<int>> eligible;
  for (const auto& r : tracked_) {
    const int order = priority_order(block_of(r));
    if (order <= stop) eligible[order].push_back(r.e);
  }
  for (const auto& [order, members] : eligible) {
    const BlockId id = block_at_order(order);
    if (strategy_->run_block(*this, id, members, s)) {
      emit(TraceEvent(s, event_kind::kPart2End).set("block", block_label(id)).set("reason", "acted"));
      initialize_block(block_at_order(order + 1), s, "act");
      return;
    }
  }
  emit(TraceEvent(s, event_kind::kPart2End).set("block", block_label(block_at_order(stop))).set("reason", "reached"));
}

void Construction::initialize_block(const BlockId& target, Stage s, std::string_view cause) {
  const int order = priority_order(target);
  emit(TraceEvent(s, event_kind::kInitialize).set("block", block_label(target)).set("cause", std::string(cause)));

  std::vector<RequirementId> covered;
  for (const auto& r : tracked_) {
    const BlockId home = block_of(r);
    if (priority_order(home) >= order) {
      covered.push_back(r);
      block(home);
    }
  }
  block(target);
  for (auto& [id, state] : blocks_) {
    if (priority_order(id) < order) continue;
    state.restraint = -1;
    state.last_initialized = s;
    ++state.initializations;
  }
  for (const auto& r : covered) strategy_->initialize_requirement(*this, r, s);

  if (!initiator_ || order < priority_order(*initiator_)) initiator_ = target;
}

void Construction::update_assignments(Stage s, const std::optional<BlockId>& initiator) {
  TraceEvent ev(s, event_kind::kAssignmentUpdate);
  if (!initiator) {
    emit(std::move(ev.set("block", "none")));
    return;
  }
  const Side side = requirement_side_for(initiator->side);
  const int tail = assignment_.tail(side, initiator->index);
  if (tail < 0 || tail > s)
    throw InvariantViolation(s, "tail " + std::to_string(tail) + " of " + block_label(*initiator) +
                                    " is beyond the stage");
  assignment_.apply(side, initiator->index, tail, s);
  emit(std::move(ev.set("block", block_label(*initiator)).set("tail", tail)));
}

}  // namespace splitsim
