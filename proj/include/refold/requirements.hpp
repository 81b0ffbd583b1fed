#pragma once

// Requirement ledger: abstraction levels of requirement specs, level 0 the
// strongest. "a is less abstract than b" means a refines b.

#include "refold/refinement.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace refold {

struct Requirement {
    std::string id;
    Component spec;
};

enum class Abstraction { less_abstract, more_abstract, equivalent, incomparable };

std::string_view abstraction_name(Abstraction a);

/// Throws E_IFACE_MISMATCH or E_BUDGET.
Abstraction abstraction_relation(const Requirement& a, const Requirement& b, const Bounds& bounds);

struct RequirementLedger {
    std::optional<Interface> iface;                // adopted from the first requirement
    std::vector<std::vector<Requirement>> levels;  // each level in insertion order
    std::vector<std::string> history;              // ids in insertion order

    [[nodiscard]] const Requirement* find(std::string_view id) const;
    [[nodiscard]] std::optional<std::size_t> level_of(std::string_view id) const;
    [[nodiscard]] std::size_t size() const { return history.size(); }
};

enum class OutcomeKind { promoted_to_abstract, replaced, new_dimension, duplicate };

std::string_view outcome_name(OutcomeKind k);

struct LevelSoundness {
    std::size_t level = 0;  // level implies level + 1
    RefinementVerdict verdict;
};

struct InsertionOutcome {
    OutcomeKind kind = OutcomeKind::new_dimension;
    std::size_t level = 0;                // where R landed
    std::optional<std::string> witness;   // promoted: first level-0 requirement implying R
    std::vector<std::string> displaced;   // replaced: moved to level 1
    std::optional<std::string> duplicate_of;
    std::vector<std::string> notes;       // relations to deeper levels, informational
    std::vector<LevelSoundness> soundness;  // touched level pairs
    std::vector<std::size_t> touched_levels;
};

struct AddResult {
    RequirementLedger ledger;
    InsertionOutcome outcome;
};

/// Case (2) first, then (1), then (3). An R equivalent to a ledgered
/// requirement is a Duplicate, whatever its id. Throws E_IFACE_MISMATCH,
/// E_DUP_ID (id taken by a non-equivalent requirement), E_BUDGET.
AddResult add_requirement(const RequirementLedger& ledger, Requirement r, const Bounds& bounds);

/// One component whose behavior is the conjunction of `reqs`. Variables and
/// labels are renamed apart with a `__r<i>_` prefix.
Component conjunction(const std::vector<Requirement>& reqs, const Interface& iface, const std::string& name);

/// Level k implies level k + 1.
LevelSoundness check_level_soundness(const RequirementLedger& ledger, std::size_t k, const Bounds& bounds);

struct SystemVerdict {
    std::string id;
    RefinementVerdict verdict;
};

struct SystemCheck {
    bool holds = true;
    std::vector<SystemVerdict> verdicts;  // level 0 only
};

SystemCheck check_system(const Component& system, const RequirementLedger& ledger, const Bounds& bounds);

/// Directory layout: `index` (one `ID LEVEL` line per requirement, insertion
/// order) and `levelK/ID.fspec`.
void save_ledger(const RequirementLedger& ledger, const std::filesystem::path& dir);
RequirementLedger load_ledger(const std::filesystem::path& dir);

} // namespace refold
