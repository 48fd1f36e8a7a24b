#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "simplexmc/ensemble.hpp"
#include "simplexmc/path.hpp"
#include "simplexmc/semigroup.hpp"

namespace simplexmc {

/// Event-stream format, one JSON object per line: a header record
/// {"k","n","horizon","seed","initial"} followed by {"t","site","from","to"}
/// records in time order. Reading re-runs full ensemble validation.
void write_ensemble_jsonl(const EnsemblePath& e, const std::string& path);
EnsemblePath read_ensemble_jsonl(const std::string& path);

/// Time-series format: header `t,y1,...,yk`, one `%.17g` row per time, so a
/// write/read round trip is exact. The writer overload without explicit
/// times uses the path's own breakpoints.
void write_path_csv(const SimplexPath& p, const std::vector<double>& times,
                    const std::string& path);
void write_path_csv(const SimplexPath& p, const std::string& path);

/// Rows become a path under the caller's reading of the samples: step holds
/// or a polyline. horizon < 0 means "last row's time".
SimplexPath read_path_csv(const std::string& path, SimplexPath::Interp interp,
                          double horizon = -1.0);

/// Table format: {"k","grid","factors","transfer","origin"} with factors as
/// flat row-major k*k arrays, plus "y0" when the table knows its starting
/// marginal.
void write_semigroup_json(const SemigroupTable& tab, const std::string& path);
SemigroupTable read_semigroup_json(const std::string& path);

/// 64-bit FNV-1a over the file's raw bytes, as 16 hex digits.
std::string file_digest(const std::string& path);

/// Run manifest written alongside outputs: command, echoed config, library
/// version, seed, and a name/bytes/digest row per artifact. Worker count is
/// deliberately not part of it; the same manifest must mean the same bytes.
void write_manifest(const std::string& out_path, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& config,
                    std::uint64_t seed, const std::vector<std::string>& files);

}
