#include "simplexmc/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "simplexmc/version.hpp"

namespace simplexmc {

namespace {

using ordered_json = nlohmann::ordered_json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  return in;
}

void finish_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}

void write_ensemble_jsonl(const EnsemblePath& e, const std::string& path) {
  std::ofstream out = open_out(path);
  ordered_json header;
  header["k"] = e.k();
  header["n"] = e.n();
  header["horizon"] = e.horizon();
  header["seed"] = e.seed();
  header["initial"] = e.initial_colors();
  out << header.dump() << '\n';
  for (const FlipEvent& ev : e.events()) {
    ordered_json rec;
    rec["t"] = ev.t;
    rec["site"] = ev.site;
    rec["from"] = ev.from;
    rec["to"] = ev.to;
    out << rec.dump() << '\n';
  }
  finish_out(out, path);
}

EnsemblePath read_ensemble_jsonl(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": missing header record");

  try {
    ordered_json header = ordered_json::parse(line);
    int k = header.at("k").get<int>();
    int n = header.at("n").get<int>();
    double horizon = header.at("horizon").get<double>();
    std::uint64_t seed = header.at("seed").get<std::uint64_t>();
    std::vector<int> initial = header.at("initial").get<std::vector<int>>();

    std::vector<FlipEvent> events;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      ordered_json rec = ordered_json::parse(line);
      events.push_back(FlipEvent{rec.at("t").get<double>(), rec.at("site").get<int>(),
                                 rec.at("from").get<int>(), rec.at("to").get<int>()});
    }
    return EnsemblePath(k, n, horizon, std::move(initial), std::move(events), seed);
  } catch (const ordered_json::exception& err) {
    throw std::runtime_error(path + ": " + err.what());
  }
}

void write_path_csv(const SimplexPath& p, const std::vector<double>& times,
                    const std::string& path) {
  std::ofstream out = open_out(path);
  out << 't';
  for (int j = 0; j < p.dim(); ++j) out << ",y" << j + 1;
  out << '\n';
  for (double t : times) {
    SimplexPoint y = p.at(t);
    out << fmt17(t);
    for (int j = 0; j < p.dim(); ++j) out << ',' << fmt17(y[j]);
    out << '\n';
  }
  finish_out(out, path);
}

void write_path_csv(const SimplexPath& p, const std::string& path) {
  write_path_csv(p, p.breakpoints(), path);
}

SimplexPath read_path_csv(const std::string& path, SimplexPath::Interp interp, double horizon) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  if (line.size() && line.back() == '\r') line.pop_back();

  int cols = 1;
  for (char c : line) cols += c == ',';
  int k = cols - 1;
  if (k < 1 || line.substr(0, 2) != "t,") {
    throw std::runtime_error(path + ": expected header t,y1,...,yk");
  }

  std::vector<SimplexPath::Sample> samples;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(row, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cell.size() || cell.empty()) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad number '" + cell +
                                 "'");
      }
      vals.push_back(v);
    }
    if (static_cast<int>(vals.size()) != cols) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(cols) + " columns");
    }
    double t = vals.front();
    vals.erase(vals.begin());
    samples.push_back(SimplexPath::Sample{t, SimplexPoint(std::move(vals))});
  }
  return SimplexPath::from_samples(std::move(samples), interp, horizon);
}

void write_semigroup_json(const SemigroupTable& tab, const std::string& path) {
  std::ofstream out = open_out(path);
  ordered_json doc;
  doc["k"] = tab.dim();
  doc["grid"] = tab.grid();
  ordered_json factors = ordered_json::array();
  for (const StochasticMatrix& q : tab.factors()) {
    ordered_json flat = ordered_json::array();
    for (int i = 0; i < q.dim(); ++i) {
      for (int j = 0; j < q.dim(); ++j) flat.push_back(q(i, j));
    }
    factors.push_back(std::move(flat));
  }
  doc["factors"] = std::move(factors);
  doc["transfer"] = tab.transfer();
  doc["origin"] = tab.origin() == TableOrigin::ConstructedFromPath ? "constructed" : "estimated";
  if (tab.y0()) doc["y0"] = tab.y0()->weights();
  out << doc.dump(2) << '\n';
  finish_out(out, path);
}

SemigroupTable read_semigroup_json(const std::string& path) {
  std::ifstream in = open_in(path);
  try {
    ordered_json doc = ordered_json::parse(in);
    int k = doc.at("k").get<int>();
    std::vector<double> grid = doc.at("grid").get<std::vector<double>>();
    std::vector<StochasticMatrix> factors;
    for (const auto& flat : doc.at("factors")) {
      std::vector<double> entries = flat.get<std::vector<double>>();
      if (static_cast<int>(entries.size()) != k * k) {
        throw std::runtime_error(path + ": factor is not a flat k*k array");
      }
      factors.emplace_back(k, std::move(entries));
    }
    std::vector<double> transfer = doc.at("transfer").get<std::vector<double>>();
    std::string origin = doc.at("origin").get<std::string>();
    if (origin != "constructed" && origin != "estimated") {
      throw std::runtime_error(path + ": unknown origin '" + origin + "'");
    }
    std::optional<SimplexPoint> y0;
    if (doc.contains("y0")) y0.emplace(doc.at("y0").get<std::vector<double>>());
    return SemigroupTable(std::move(grid), std::move(factors), std::move(transfer),
                          origin == "constructed" ? TableOrigin::ConstructedFromPath
                                                  : TableOrigin::EstimatedFromEnsemble,
                          std::move(y0));
  } catch (const ordered_json::exception& err) {
    throw std::runtime_error(path + ": " + err.what());
  }
}

std::string file_digest(const std::string& path) {
  std::ifstream in = open_in(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf), in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

void write_manifest(const std::string& out_path, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& config,
                    std::uint64_t seed, const std::vector<std::string>& files) {
  ordered_json doc;
  doc["command"] = command;
  ordered_json cfg;
  for (const auto& [key, value] : config) cfg[key] = value;
  doc["config"] = std::move(cfg);
  doc["version"] = kVersion;
  doc["seed"] = seed;
  ordered_json rows = ordered_json::array();
  for (const std::string& file : files) {
    std::string name = file;
    if (auto slash = name.find_last_of('/'); slash != std::string::npos) {
      name = name.substr(slash + 1);
    }
    std::ifstream probe = open_in(file);
    probe.seekg(0, std::ios::end);
    ordered_json row;
    row["name"] = name;
    row["bytes"] = static_cast<std::uint64_t>(probe.tellg());
    row["digest"] = file_digest(file);
    rows.push_back(std::move(row));
  }
  doc["files"] = std::move(rows);
  std::ofstream out = open_out(out_path);
  out << doc.dump(2) << '\n';
  finish_out(out, out_path);
}

}
