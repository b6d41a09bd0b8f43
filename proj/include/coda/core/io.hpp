#pragma once

#include <iosfwd>
#include <string>

#include "coda/core/dataset.hpp"

namespace coda {

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_real(double v);

/// FactorSpec <-> JSON document.
std::string spec_to_json(const FactorSpec& spec);
FactorSpec spec_from_json(const std::string& json_text);
void save_spec(const FactorSpec& spec, const std::string& path);
FactorSpec load_spec(const std::string& path);

/// Transitions as JSON-lines: one object per line with keys
/// s, a, s_next, r, tag; reals carry 17 significant digits.
void write_jsonl(const Dataset& ds, std::ostream& os);
void save_jsonl(const Dataset& ds, const std::string& path);
Dataset read_jsonl(const FactorSpec& spec, std::istream& is);
Dataset load_jsonl(const FactorSpec& spec, const std::string& path);

/// CSV export with header s0..s{n-1},a0..a{m-1},sp0..sp{n-1},r,tag.
void write_csv(const Dataset& ds, std::ostream& os);
void save_csv(const Dataset& ds, const std::string& path);

}  // namespace coda
