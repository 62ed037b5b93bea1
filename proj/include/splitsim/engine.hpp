#pragma once

// The construction chassis shared by the Sacks and Robinson splittings:
// blocks of requirements, dynamic priority assignments, restraints, routing
// of B-arrivals, initialization cascades, and the stage driver.

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "splitsim/core_model.hpp"
#include "splitsim/trace.hpp"

namespace splitsim {

class InvariantViolation : public std::logic_error {
 public:
  InvariantViolation(Stage stage, const std::string& what)
      : std::logic_error("stage " + std::to_string(stage) + ": " + what), stage_(stage) {}
  Stage stage() const { return stage_; }

 private:
  Stage stage_;
};

using RequirementId = FunctionalId;
std::string requirement_label(const RequirementId& r);  // "P:3"
std::optional<RequirementId> parse_requirement_label(std::string_view text);

/// Lambda blocks hold P-requirements, Upsilon blocks hold Q-requirements.
enum class BlockSide { Lambda, Upsilon };

struct BlockId {
  BlockSide side = BlockSide::Lambda;
  int index = 0;
  friend auto operator<=>(const BlockId&, const BlockId&) = default;
};

inline BlockSide block_side_for(Side s) { return s == Side::P ? BlockSide::Lambda : BlockSide::Upsilon; }
inline Side requirement_side_for(BlockSide b) { return b == BlockSide::Lambda ? Side::P : Side::Q; }

/// Lambda(0) < Upsilon(0) < Lambda(1) < ... as 0, 1, 2, ...
int priority_order(const BlockId& block);
BlockId block_at_order(int order);
std::string block_label(const BlockId& block);  // "L:2", "U:0"
std::optional<BlockId> parse_block_label(std::string_view text);

struct BlockState {
  BlockId id;
  int restraint = -1;  // -1 when no restraint is set
  std::optional<Stage> last_initialized;
  int initializations = 0;
  int max_restraint = -1;
};

bool threatens(int x, const BlockState& block);

/// lambda_s / mu_s. Requirement indices 0..width-1 are stored; beyond that the
/// assignment grows by one block per index.
class PriorityAssignment {
 public:
  explicit PriorityAssignment(int width);

  int width() const { return static_cast<int>(lambda_.size()); }
  int block_of(Side side, int e) const;
  /// Greatest e with block_of(side, e) == i.
  int tail(Side side, int i) const;
  /// Inclusive [first, last] of the block; first > last when empty.
  std::pair<int, int> members(Side side, int i) const;
  Stage last_changed(Side side, int e) const;

  /// Update after block `i` (tail `tail`) is initialized at stage s: indices
  /// up to the tail keep their block, tail < j <= s join block i, and j > s
  /// move to block i + (j - s).
  void apply(Side side, int i, int tail, Stage s);

 private:
  std::vector<int>& row(Side side) { return side == Side::P ? lambda_ : mu_; }
  const std::vector<int>& row(Side side) const { return side == Side::P ? lambda_ : mu_; }

  std::vector<int> lambda_;
  std::vector<int> mu_;
  std::vector<Stage> lambda_changed_;
  std::vector<Stage> mu_changed_;
};

enum class RouteTarget { A0, A1 };

struct RoutingDecision {
  RouteTarget target = RouteTarget::A0;
  std::optional<BlockId> threatened;
  std::optional<BlockId> initialize;
};

/// Part I for one B-arrival: the strongest threatened block decides the side.
RoutingDecision route_element(int x, const std::map<BlockId, BlockState>& blocks);

struct Arrivals {
  std::optional<int> b;
  std::vector<int> c;
  std::vector<int> d;
};

struct World {
  EnumerationSchedule b{Role::B}, c{Role::C}, d{Role::D}, a0{Role::A0}, a1{Role::A1};
  Snapshot b_now, c_now, d_now, a0_now, a1_now;

  const Snapshot& side_set(Side s) const { return s == Side::P ? a0_now : a1_now; }
};

class Construction;

/// A requirement strategy: Part II for one block plus initialization hooks.
class Strategy {
 public:
  virtual ~Strategy() = default;

  /// Requirements with a functional table; all others never act.
  virtual std::vector<RequirementId> requirements() const = 0;

  /// Runs each member of an eligible block at even stage s. Returns true if
  /// some member acted.
  virtual bool run_block(Construction& run, const BlockId& block, std::span<const int> members, Stage s) = 0;

  virtual void initialize_requirement(Construction& run, const RequirementId& r, Stage s) = 0;

  /// Called after Part I routing and after Part II, once initializations of
  /// the stage have been applied.
  virtual void after_changes(Construction& run, Stage s) { (void)run, (void)s; }

  virtual void finish(Construction& run) { (void)run; }
};

class Construction {
 public:
  Construction(Horizon horizon, std::unique_ptr<Strategy> strategy);

  /// Stages must be run in increasing order from 0.
  void run_stage(Stage s, const Arrivals& arrivals);

  Horizon horizon() const { return horizon_; }
  const World& world() const { return world_; }
  const Trace& trace() const { return trace_; }
  Trace& mutable_trace() { return trace_; }
  const PriorityAssignment& assignment() const { return assignment_; }
  const std::map<BlockId, BlockState>& blocks() const { return blocks_; }
  Strategy& strategy() { return *strategy_; }
  const Strategy& strategy() const { return *strategy_; }

  BlockState& block(const BlockId& id);
  int restraint(const BlockId& id) const;
  BlockId block_of(const RequirementId& r) const;

  void set_restraint(const BlockId& id, int value, Stage s);
  void emit(TraceEvent ev) { trace_.push_back(std::move(ev)); }

  void initialize_block(const BlockId& target, Stage s, std::string_view cause);
  void update_assignments(Stage s, const std::optional<BlockId>& initiator);

  void finish() { strategy_->finish(*this); }

 private:
  void enumerate_arrivals(Stage s, const Arrivals& arrivals);
  void part_one(Stage s, int x);
  void part_two(Stage s);

  Horizon horizon_;
  std::unique_ptr<Strategy> strategy_;
  std::vector<RequirementId> tracked_;
  World world_;
  PriorityAssignment assignment_;
  std::map<BlockId, BlockState> blocks_;
  Trace trace_;
  Stage next_stage_ = 0;
  std::optional<BlockId> initiator_;
};

}  // namespace splitsim
