#include "gle/spec_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace gle {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& raw) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : raw) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

[[noreturn]] void missing(const std::string& section, const std::string& key) {
    throw parse_error("missing key '" + key + "'" +
                      (section.empty() ? "" : " in section [" + section + "]"));
}

Barrier barrier_from(const std::string& raw, bool is_top, Time T0, Time T1) {
    const std::string v = trim(raw);
    if (v == "+inf" || v == "inf") {
        if (!is_top) throw parse_error("bottom barrier cannot be +inf");
        return Barrier::plus_infinity();
    }
    if (v == "-inf") {
        if (is_top) throw parse_error("top barrier cannot be -inf");
        return Barrier::minus_infinity();
    }
    std::vector<long> vals = parse_long_list(v);
    if (static_cast<Time>(vals.size()) != T1 - T0 + 1)
        throw parse_error("barrier list must have T1 - T0 + 1 values");
    try {
        return Barrier::path(make_path(T0, std::vector<Level>(vals.begin(), vals.end())));
    } catch (const step_violation& e) {
        throw parse_error(std::string("barrier is not an up-right path: ") + e.what());
    }
}

std::string barrier_to(const Barrier& b) {
    if (b.kind() == Barrier::Kind::plus_infinity) return "+inf";
    if (b.kind() == Barrier::Kind::minus_infinity) return "-inf";
    std::ostringstream os;
    const UpRightPath& p = b.as_path();
    for (size_t i = 0; i < p.values.size(); ++i) {
        if (i) os << ", ";
        os << p.values[i];
    }
    return os.str();
}

template <typename T>
std::string join(const std::vector<T>& v) {
    std::ostringstream os;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        os << v[i];
    }
    return os.str();
}

} // namespace

bool ConfigDoc::has(const std::string& section, const std::string& key) const {
    auto s = sections.find(section);
    return s != sections.end() && s->second.count(key) > 0;
}

const std::string& ConfigDoc::get(const std::string& section, const std::string& key) const {
    auto s = sections.find(section);
    if (s == sections.end()) missing(section, key);
    auto k = s->second.find(key);
    if (k == s->second.end()) missing(section, key);
    return k->second;
}

std::string ConfigDoc::get_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

long ConfigDoc::get_long(const std::string& section, const std::string& key) const {
    return parse_long_value(get(section, key));
}

long ConfigDoc::get_long_or(const std::string& section, const std::string& key,
                            long fallback) const {
    return has(section, key) ? get_long(section, key) : fallback;
}

double ConfigDoc::get_double(const std::string& section, const std::string& key) const {
    return parse_double_value(get(section, key));
}

double ConfigDoc::get_double_or(const std::string& section, const std::string& key,
                                double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

std::vector<long> ConfigDoc::get_longs(const std::string& section, const std::string& key) const {
    return parse_long_list(get(section, key));
}

std::vector<double> ConfigDoc::get_doubles(const std::string& section,
                                           const std::string& key) const {
    return parse_double_list(get(section, key));
}

ConfigDoc parse_config(const std::string& text) {
    ConfigDoc doc;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3)
                throw parse_error("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            doc.sections[section];
            continue;
        }
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw parse_error("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw parse_error("line " + std::to_string(lineno) + ": empty key");
        auto& sec = doc.sections[section];
        if (sec.count(key))
            throw parse_error("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        sec[key] = value;
    }
    return doc;
}

ConfigDoc load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

long parse_long_value(const std::string& raw) {
    const std::string v = trim(raw);
    long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw parse_error("not an integer: '" + raw + "'");
    return out;
}

double parse_double_value(const std::string& raw) {
    const std::string v = trim(raw);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw parse_error("not a number: '" + raw + "'");
    return out;
}

std::vector<long> parse_long_list(const std::string& raw) {
    std::vector<long> out;
    for (const std::string& tok : split_list(raw)) out.push_back(parse_long_value(tok));
    return out;
}

std::vector<double> parse_double_list(const std::string& raw) {
    std::vector<double> out;
    for (const std::string& tok : split_list(raw)) out.push_back(parse_double_value(tok));
    return out;
}

EnsembleSpec ensemble_spec_from(const ConfigDoc& doc, const std::string& section) {
    const Time T0 = doc.get_long(section, "T0");
    const Time T1 = doc.get_long(section, "T1");
    const long k = doc.get_long(section, "k");
    std::vector<long> xr = doc.get_longs(section, "x");
    std::vector<long> yr = doc.get_longs(section, "y");
    if (static_cast<long>(xr.size()) != k || static_cast<long>(yr.size()) != k)
        throw parse_error("x and y must each have k values");
    Barrier top = doc.has(section, "top") ? barrier_from(doc.get(section, "top"), true, T0, T1)
                                          : Barrier::plus_infinity();
    Barrier bottom = doc.has(section, "bottom")
                         ? barrier_from(doc.get(section, "bottom"), false, T0, T1)
                         : Barrier::minus_infinity();
    std::vector<Level> x(xr.begin(), xr.end());
    std::vector<Level> y(yr.begin(), yr.end());
    try {
        if (doc.has(section, "S")) {
            std::vector<long> sr = doc.get_longs(section, "S");
            return make_spec(T0, T1, std::move(x), std::move(y), top, bottom,
                             std::vector<Time>(sr.begin(), sr.end()));
        }
        return make_spec(T0, T1, std::move(x), std::move(y), top, bottom);
    } catch (const gle::error& e) {
        throw parse_error(std::string("invalid boundary data: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw parse_error(std::string("invalid boundary data: ") + e.what());
    }
}

EnsembleSpec parse_ensemble_spec(const std::string& text) {
    return ensemble_spec_from(parse_config(text));
}

std::string format_ensemble_spec(const EnsembleSpec& spec) {
    std::ostringstream os;
    os << "T0 = " << spec.T0 << "\n";
    os << "T1 = " << spec.T1 << "\n";
    os << "k = " << spec.k << "\n";
    os << "x = " << join(spec.x) << "\n";
    os << "y = " << join(spec.y) << "\n";
    os << "top = " << barrier_to(spec.top) << "\n";
    os << "bottom = " << barrier_to(spec.bottom) << "\n";
    if (!spec.S_is_full()) os << "S = " << join(spec.S) << "\n";
    return os.str();
}

LimitSpec limit_spec_from(const ConfigDoc& doc, const std::string& section) {
    const double p = doc.get_double(section, "p");
    const double t = doc.get_double(section, "t");
    std::vector<double> a = doc.get_doubles(section, "a");
    std::vector<double> b = doc.get_doubles(section, "b");
    try {
        return make_limit_spec(p, t, std::move(a), std::move(b));
    } catch (const gle::error& e) {
        throw parse_error(std::string("invalid limit data: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw parse_error(std::string("invalid limit data: ") + e.what());
    }
}

LimitSpec parse_limit_spec(const std::string& text) {
    return limit_spec_from(parse_config(text));
}

std::string format_limit_spec(const LimitSpec& spec) {
    std::ostringstream os;
    os.precision(17);
    os << "p = " << spec.p << "\n";
    os << "t = " << spec.t << "\n";
    os << "a = " << join(spec.a) << "\n";
    os << "b = " << join(spec.b) << "\n";
    return os.str();
}

} // namespace gle
