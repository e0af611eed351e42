#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "valdyn/cusp.hpp"
#include "valdyn/transport.hpp"

namespace valdyn {

struct CuspFixture {
    CuspData cusp;
    std::optional<QuadElem> alpha;
};

// Everything a fixture file can describe.  A germ comes either from
// explicit sectors or from the cusp block, never both.
struct Fixture {
    std::filesystem::path path;
    std::optional<DualGraph> graph;
    std::optional<SkeletonMap> germ;
    std::optional<GermResolutionTable> table;
    std::optional<CuspFixture> cusp;
};

// Throws Error{"parse_error"} on unreadable or malformed files and the
// validation kinds of the respective modules on invalid content.
Fixture load_fixture(const std::filesystem::path& path);
DualGraph load_graph(const std::filesystem::path& path);
SkeletonMap load_germ(const std::filesystem::path& path);
GermResolutionTable load_table(const std::filesystem::path& path);
CuspFixture load_cusp(const std::filesystem::path& path);

// Same, from TOML text (paths inside resolve against `base`).
Fixture parse_fixture(std::string_view text, const std::filesystem::path& base = {});

}  // namespace valdyn
