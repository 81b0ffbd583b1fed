#pragma once

// Text front end for `.fspec` components and `.fgroup` manifests.
//
//   component NAME [generated]       -- or: requirement NAME [generated]
//   in NAME : {a, b}
//   out NAME : int LO..HI
//   state NAME : DOMAIN init VALUE
//   local NAME : DOMAIN
//   gar
//   LABEL: GUARD ==> ATOM && ATOM ...
//
// An atom is `target = EXPR`, `state' = EXPR` or `target in {v, ...}`.

#include "refold/group.hpp"
#include "refold/model.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace refold {

Result<Component> parse_component(std::string_view text, const std::string& file = {});

/// Canonical text; parse_component(render_component(c)) == c.
std::string render_component(const Component& comp);
std::string render_formula(const Formula& f);
std::string render_expr(const ExprPtr& e);

/// Formula lines (an optional leading `gar` is accepted) whose identifiers
/// resolve against `context`. The formulas are not validated.
Result<std::vector<Formula>> parse_formulas(std::string_view text, const Component& context,
                                            const std::string& file = {});

Result<GroupManifest> parse_manifest(std::string_view text, const std::string& file = {});
std::string render_manifest(const GroupManifest& manifest);

/// Loads the specs a manifest references, relative to `base_dir`, and checks
/// the group shape.
Result<SpecificationGroup> load_group(const GroupManifest& manifest, const std::filesystem::path& base_dir);

Result<SpecificationGroup> parse_group_manifest(std::string_view text, const std::filesystem::path& base_dir,
                                                const std::string& file = {});

Result<Component> load_component(const std::filesystem::path& path);

/// Whole file as a string; throws Error(Code::io).
std::string read_file(const std::filesystem::path& path);
/// Writes with LF line endings; throws Error(Code::io).
void write_file(const std::filesystem::path& path, std::string_view text);

} // namespace refold
