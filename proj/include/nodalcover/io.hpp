#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nodalcover/cover.hpp"
#include "nodalcover/group.hpp"
#include "nodalcover/nodal.hpp"
#include "nodalcover/spectra.hpp"
#include "nodalcover/stability.hpp"
#include "nodalcover/surface.hpp"

namespace nodalcover::io {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t value);

// Complex: {"vertices", "edges": [[u, v, w]], "faces": [[e...]], "mass", "infinity_edges", optional "coords"}.
Json to_json(const SurfaceComplex& c);
/// Accepts a complex object or any object carrying one under "complex"; validates.
SurfaceComplex complex_from_json(const Json& j);

// Cover: {"base": path or complex, "degree", "tree": [edge ids], "voltages": {"edge": perm}}.
Json to_json(const CoverSpec& spec, const Json& base_ref);
CoverSpec cover_spec_from_json(const Json& j, const SurfaceComplex& base);

struct LoadedCover {
  SurfaceComplex base;
  CoverSpec spec;
  Cover cover;
};

/// Relative base paths resolve against the directory of `path`.
LoadedCover load_cover(const std::filesystem::path& path);
SurfaceComplex load_complex(const std::filesystem::path& path);

Json to_json(const Presentation& p);
Presentation presentation_from_json(const Json& j);
Json to_json(const CosetAction& a);
CosetAction action_from_json(const Json& j);
Json words_to_json(const std::vector<Word>& words);
std::vector<Word> words_from_json(const Json& j);

Json to_json(const Spectrum& s, bool with_vectors = false);
std::string spectrum_csv(const Spectrum& s);
/// "rows cols nnz" header, then "row col value" lines of the stiffness and mass blocks.
std::string operator_triplets(const LaplaceOperator& op);

Json to_json(const DomainTopology& t);
Json to_json(const NodalDecomposition& d);
Json to_json(const CocycleSet& s);
Json to_json(const UnstableCoverPlan& plan, const Json& base_ref);

Json to_json(const BoundLedger& ledger);
std::string ledger_csv(const BoundLedger& ledger);

Json to_json(const StabilityReport& r);
Json to_json(const LiftingReport& r);
Json to_json(const SigmaEstimate& s);
Json to_json(const GeneratorBoundReport& r);
Json to_json(const TowerTrajectory& t);
std::string tower_csv(const TowerTrajectory& t);
Json to_json(const ContainmentReport& r);
Json to_json(const CountLedger& r);
Json to_json(const RespecRecord& r);
std::string respec_csv(const std::vector<RespecRecord>& records);
Json to_json(const OrbitBoundRecord& r);
Json weyl_json(const std::vector<WeylPoint>& curve);
std::string weyl_csv(const std::vector<WeylPoint>& curve);

}  // namespace nodalcover::io
