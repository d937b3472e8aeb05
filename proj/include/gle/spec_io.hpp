#pragma once

#include <map>
#include <string>
#include <vector>

#include "gle/ensemble.hpp"
#include "gle/limit_density.hpp"

namespace gle {

/// Line-oriented "key = value" document with optional [section] headers and
/// '#' comments.  Keys live in the section opened above them; lines before
/// any header belong to the anonymous section "".
struct ConfigDoc {
    std::map<std::string, std::map<std::string, std::string>> sections;

    bool has(const std::string& section, const std::string& key) const;
    const std::string& get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    long get_long(const std::string& section, const std::string& key) const;
    long get_long_or(const std::string& section, const std::string& key, long fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key, double fallback) const;
    std::vector<long> get_longs(const std::string& section, const std::string& key) const;
    std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
};

ConfigDoc parse_config(const std::string& text);
ConfigDoc load_config(const std::string& path);

long parse_long_value(const std::string& raw);
double parse_double_value(const std::string& raw);
std::vector<long> parse_long_list(const std::string& raw);
std::vector<double> parse_double_list(const std::string& raw);

/// Boundary-data document with fields T0, T1, k, x, y and optional
/// top / bottom ("+inf", "-inf", or a value list spanning the window) and S
/// (omitted means the whole window).
EnsembleSpec ensemble_spec_from(const ConfigDoc& doc, const std::string& section = "");
EnsembleSpec parse_ensemble_spec(const std::string& text);
std::string format_ensemble_spec(const EnsembleSpec& spec);

/// Limit-density document with fields p, t, a, b.
LimitSpec limit_spec_from(const ConfigDoc& doc, const std::string& section = "");
LimitSpec parse_limit_spec(const std::string& text);
std::string format_limit_spec(const LimitSpec& spec);

} // namespace gle
