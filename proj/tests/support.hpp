#pragma once

#include "refold/parser.hpp"
#include "refold/semantics.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

namespace testsupport {

inline std::filesystem::path fixture_dir() { return REFOLD_FIXTURE_DIR; }
inline std::filesystem::path golden_dir() { return REFOLD_GOLDEN_DIR; }

inline refold::Component fixture(const std::string& file)
{
    auto r = refold::load_component(fixture_dir() / file);
    if (!r)
        throw std::runtime_error(file + ":\n" + refold::format_diagnostics(r.diagnostics));
    return *r;
}

inline refold::Component parse(const std::string& text)
{
    auto r = refold::parse_component(text, "<test>");
    if (!r)
        throw std::runtime_error(refold::format_diagnostics(r.diagnostics));
    return *r;
}

inline nlohmann::json golden(const std::string& file)
{
    std::ifstream in(golden_dir() / file);
    if (!in)
        throw std::runtime_error("missing golden file " + file);
    return nlohmann::json::parse(in);
}

inline refold::Frame frame_from_json(const refold::Signature& sig, const nlohmann::json& j)
{
    refold::Frame f(sig.size());
    for (std::size_t i = 0; i < sig.size(); ++i) {
        const auto& v = j.at(sig.names[i]);
        std::string text = v.is_string() ? v.get<std::string>() : std::to_string(v.get<long long>());
        f[i] = sig.domains[i].parse(text).value();
    }
    return f;
}

inline refold::Trace trace_from_json(const refold::Signature& sig, const nlohmann::json& j)
{
    refold::Trace t;
    for (const auto& fr : j)
        t.frames.push_back(frame_from_json(sig, fr));
    return t;
}

} // namespace testsupport
