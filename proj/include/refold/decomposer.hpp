#pragma once

// Mechanical decomposition schemas. Each returns parts wired into a
// zero-delay pipeline whose hidden-projected behavior equals the original's.
// Generated channels carry the reserved `__` prefix: `__st_<var>` for state
// images and `__loc_<var>` for local values.

#include "refold/group.hpp"
#include "refold/refinement.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace refold {

struct DecompositionResult {
    std::string schema;  // mealy-moore, locals, outputs
    std::vector<Component> parts;
    Network network;
    std::set<std::string> aux_channels;
    std::map<std::string, std::string> provenance;  // original formula label -> part name
};

struct DecomposeOptions {
    /// Names generated parts and channels must avoid, besides the component's own.
    std::set<std::string> reserved;
};

/// `base` if free, else `base_2`, `base_3`, ...
std::string fresh_name(const std::string& base, const std::set<std::string>& taken);

/// Throws E_NOTHING_TO_SPLIT or E_MIXED_TARGET.
DecompositionResult split_mealy_moore(const Component& comp, const DecomposeOptions& opts = {});

/// Throws E_UNKNOWN_LOCAL, E_LOCAL_MIXED, E_LOCAL_STATE_DEP, or E_LOCAL_CYCLE.
DecompositionResult extract_locals(const Component& comp, const std::set<std::string>& selection,
                                   const DecomposeOptions& opts = {});

/// Throws E_UNKNOWN_OUTPUT, E_OUT_TARGETS_STATE, or E_OUT_SHARED.
DecompositionResult extract_outputs(const Component& comp, const std::set<std::string>& selection,
                                    const DecomposeOptions& opts = {});

EquivalenceVerdict verify_decomposition(const Component& original, const DecompositionResult& result,
                                        const Bounds& bounds);

/// Locals whose defining expressions have at least `threshold` nodes.
std::vector<std::string> extraction_candidates(const Component& comp, std::size_t threshold = 7);

/// Writes `<name>.fspec`, one file per part and `<name>_net.fgroup` binding the
/// original (root) to the parts (layer 1). Returns the written paths.
std::vector<std::filesystem::path> write_decomposition(const Component& original, const DecompositionResult& result,
                                                       const std::filesystem::path& dir);

} // namespace refold
