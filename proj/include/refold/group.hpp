#pragma once

#include "refold/model.hpp"

#include <string>
#include <vector>

namespace refold {

/// A root specification plus refinement layers 1..m. Layer j composes its
/// specifications into a refinement of layer j-1; layer 0 is the root.
struct SpecificationGroup {
    std::string name;
    Component root;
    std::vector<std::vector<Component>> layers;

    /// m
    [[nodiscard]] std::size_t layer_count() const { return layers.size(); }
    /// N, root included
    [[nodiscard]] std::size_t spec_count() const
    {
        std::size_t n = 1;
        for (const auto& l : layers)
            n += l.size();
        return n;
    }
};

/// File-level view of a group: the `.fgroup` text without loaded specs.
struct GroupManifest {
    std::string name;
    std::string root;
    std::vector<std::vector<std::string>> layers;

    friend bool operator==(const GroupManifest&, const GroupManifest&) = default;
};

} // namespace refold
