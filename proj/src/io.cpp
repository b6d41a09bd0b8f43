#include "coda/core/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace coda {

using nlohmann::json;

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string spec_to_json(const FactorSpec& spec) {
  json j;
  auto factors = [](const std::vector<Factor>& fs) {
    json arr = json::array();
    for (const Factor& f : fs) arr.push_back({{"name", f.name}, {"dim", f.dim}});
    return arr;
  };
  j["state_factors"] = factors(spec.state_factors());
  j["action_factors"] = factors(spec.action_factors());
  json bounds = json::array();
  for (const Interval& b : spec.bounds()) bounds.push_back({b.lo, b.hi});
  j["bounds"] = bounds;
  return j.dump(2);
}

FactorSpec spec_from_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  auto factors = [](const json& arr) {
    std::vector<Factor> fs;
    for (const auto& f : arr) {
      fs.push_back({f.at("name").get<std::string>(), f.at("dim").get<std::size_t>()});
    }
    return fs;
  };
  std::vector<Interval> bounds;
  for (const auto& b : j.at("bounds")) {
    bounds.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
  }
  return FactorSpec(factors(j.at("state_factors")), factors(j.at("action_factors")),
                    std::move(bounds));
}

void save_spec(const FactorSpec& spec, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << spec_to_json(spec) << '\n';
}

FactorSpec load_spec(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return spec_from_json(ss.str());
}

namespace {

void append_vec(std::string& line, const char* key, const Vec& v) {
  line += '"';
  line += key;
  line += "\":[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) line += ',';
    line += format_real(v[i]);
  }
  line += ']';
}

}  // namespace

void write_jsonl(const Dataset& ds, std::ostream& os) {
  std::string line;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Transition& t = ds[i];
    line.clear();
    line += '{';
    append_vec(line, "s", t.s);
    line += ',';
    append_vec(line, "a", t.a);
    line += ',';
    append_vec(line, "s_next", t.s_next);
    line += ",\"r\":";
    line += format_real(t.r);
    line += ",\"tag\":\"";
    line += to_string(ds.provenance()[i]);
    line += "\"}\n";
    os << line;
  }
}

void save_jsonl(const Dataset& ds, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_jsonl(ds, os);
}

Dataset read_jsonl(const FactorSpec& spec, std::istream& is) {
  Dataset ds(spec);
  std::string line;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error("jsonl parse error at row " + std::to_string(row) + ": " +
                               e.what());
    }
    Transition t;
    t.s = j.at("s").get<Vec>();
    t.a = j.at("a").get<Vec>();
    t.s_next = j.at("s_next").get<Vec>();
    t.r = j.at("r").get<double>();
    ds.append(t, provenance_from_string(j.at("tag").get<std::string>()));
    ++row;
  }
  return ds;
}

Dataset load_jsonl(const FactorSpec& spec, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  return read_jsonl(spec, is);
}

void write_csv(const Dataset& ds, std::ostream& os) {
  const std::size_t n = ds.spec().state_dims();
  const std::size_t m = ds.spec().action_dims();
  std::string header;
  for (std::size_t i = 0; i < n; ++i) header += "s" + std::to_string(i) + ",";
  for (std::size_t i = 0; i < m; ++i) header += "a" + std::to_string(i) + ",";
  for (std::size_t i = 0; i < n; ++i) header += "sp" + std::to_string(i) + ",";
  header += "r,tag\n";
  os << header;
  std::string line;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Transition& t = ds[i];
    line.clear();
    for (double v : t.s) {
      line += format_real(v);
      line += ',';
    }
    for (double v : t.a) {
      line += format_real(v);
      line += ',';
    }
    for (double v : t.s_next) {
      line += format_real(v);
      line += ',';
    }
    line += format_real(t.r);
    line += ',';
    line += to_string(ds.provenance()[i]);
    line += '\n';
    os << line;
  }
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_csv(ds, os);
}

}  // namespace coda
