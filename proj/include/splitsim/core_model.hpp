#pragma once

// Bounded data model shared by every construction: pairing, bit strings,
// stage-indexed enumerations, and Turing functionals given as axiom tables.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace splitsim {

using Natural = std::uint64_t;
using Stage = int;

/// Cantor pairing (a+b)(a+b+1)/2 + b.
Natural pair(Natural a, Natural b);
std::pair<Natural, Natural> unpair(Natural n);

/// Last construction stage; stages run 0..last inclusive.
class Horizon {
 public:
  explicit Horizon(int last);
  int last() const { return last_; }
  bool contains_stage(Stage s) const { return s >= 0 && s <= last_; }
  bool contains_element(int x) const { return x >= 0 && x < last_; }

 private:
  int last_;
};

class BitString {
 public:
  BitString() = default;
  explicit BitString(std::vector<std::uint8_t> bits);

  /// Parses an ASCII "0"/"1" string; throws std::invalid_argument otherwise.
  static BitString parse(std::string_view text);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  bool is_prefix_of(const BitString& other) const;
  std::string str() const;

  friend bool operator==(const BitString&, const BitString&) = default;
  friend auto operator<=>(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// One string is an initial segment of the other.
bool compatible(const BitString& a, const BitString& b);

enum class Role { B, C, D, A0, A1, W };
std::string_view role_name(Role r);

/// The members of a c.e. set as of one stage, held as a dense bitmap.
class Snapshot {
 public:
  Snapshot() = default;
  explicit Snapshot(Stage stage) : stage_(stage) {}

  Stage stage() const { return stage_; }
  bool contains(Natural x) const { return x < bits_.size() && bits_[x]; }
  void insert(Natural x);
  void advance_to(Stage s) { stage_ = s; }
  std::vector<Natural> members() const;
  std::size_t size() const { return count_; }

  /// Characteristic string of the first n bits ("X restricted to n").
  BitString prefix(std::size_t n) const;

  friend bool operator==(const Snapshot& a, const Snapshot& b) { return a.members() == b.members(); }

 private:
  Stage stage_ = 0;
  std::vector<bool> bits_;
  std::size_t count_ = 0;
};

class ScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A stage-indexed enumeration of a c.e. set. An element enters at most once
/// and never leaves.
class EnumerationSchedule {
 public:
  struct Entry {
    Stage stage;
    Natural element;
    friend bool operator==(const Entry&, const Entry&) = default;
    friend auto operator<=>(const Entry&, const Entry&) = default;
  };

  explicit EnumerationSchedule(Role role = Role::B) : role_(role) {}

  Role role() const { return role_; }

  /// Throws ScheduleError when the element is already enumerated.
  void add(Stage stage, Natural element);

  std::optional<Stage> stage_of(Natural element) const;
  bool contains_at(Natural element, Stage s) const;

  /// Entries ordered by (stage, element).
  std::vector<Entry> entries() const;
  std::vector<Natural> arrivals_at(Stage s) const;
  std::size_t size() const { return by_element_.size(); }
  bool empty() const { return by_element_.empty(); }
  Stage last_stage() const;

  Snapshot snapshot(Stage s) const;

 private:
  Role role_;
  std::map<Natural, Stage> by_element_;
  std::multimap<Stage, Natural> by_stage_;
};

/// True iff sigma is an initial segment of the characteristic sequence of snap.
bool in_cone(const BitString& sigma, const Snapshot& snap);

/// Stages t in [from, until) are exactly those with C_t in [sigma]; `until`
/// is INT_MAX when the cone is never left. Empty when from >= until.
struct ConeWindow {
  Stage from;
  Stage until;
  bool contains(Stage t) const { return t >= from && t < until; }
};
ConeWindow cone_window(const BitString& sigma, const EnumerationSchedule& sched);

struct Axiom {
  BitString theta;
  std::optional<BitString> sigma;
  Natural x = 0;
  int k = 0;

  std::size_t use() const { return theta.size(); }
  friend bool operator==(const Axiom&, const Axiom&) = default;
};

enum class Side { P = 0, Q = 1 };
inline char side_char(Side s) { return s == Side::P ? 'P' : 'Q'; }

struct FunctionalId {
  Side side = Side::P;
  int e = 0;
  friend auto operator<=>(const FunctionalId&, const FunctionalId&) = default;
};

struct Outcome {
  bool convergent = false;
  int k = 0;
  std::size_t use = 0;

  static Outcome divergent() { return {}; }
  static Outcome converge(int k, std::size_t use) { return {true, k, use}; }
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct StagedAxiom {
  Stage appear = 0;
  Axiom axiom;
};

struct AxiomConflict {
  std::size_t first;
  std::size_t second;
};

/// A Turing functional given by its axioms. Phi_e is side P, Psi_e side Q.
class FunctionalTable {
 public:
  FunctionalTable() = default;
  FunctionalTable(FunctionalId id, std::vector<StagedAxiom> axioms);

  const FunctionalId& id() const { return id_; }
  const std::vector<StagedAxiom>& axioms() const { return axioms_; }
  bool binary() const;

  /// Converges iff some axiom that has appeared by stage s applies to the
  /// oracle(s); the applicable axiom with least (use, k) is reported.
  Outcome evaluate(Stage s, const Snapshot& oracle_a, const Snapshot* oracle_c, Natural x) const;
  /// The axiom evaluate() reports, or nullptr when divergent.
  const StagedAxiom* applicable(Stage s, const Snapshot& oracle_a, const Snapshot* oracle_c, Natural x) const;

 private:
  FunctionalId id_;
  std::vector<StagedAxiom> axioms_;
  // Axiom positions grouped by input, each group sorted by (use, k).
  std::map<Natural, std::vector<std::size_t>> by_input_;
};

/// Every pair of axioms with compatible oracle strings, equal input, and
/// different outputs. Empty means the table is consistent.
std::vector<AxiomConflict> validate_consistency(const FunctionalTable& table);

Outcome evaluate(const FunctionalTable& table, Stage s, const Snapshot& oracle_a,
                 const Snapshot* oracle_c, Natural x);

}  // namespace splitsim
