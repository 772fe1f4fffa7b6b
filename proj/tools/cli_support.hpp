#pragma once
// Config loading, CSV output and run manifests for the subdyn CLI.

#include "subdyn/error.hpp"
#include "subdyn/flows.hpp"

#include "json.hpp"

#include <charconv>
#include <chrono>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace subdyn::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kHypothesis = 2, kPrecision = 3, kConfig = 4 };

inline int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::WrongClass:
        case ErrorKind::NotMeanZero:
        case ErrorKind::DegenerateF:
        case ErrorKind::NotPrimitive:
        case ErrorKind::RepeatedEigenvalue:
        case ErrorKind::ZeroEigenvalue:
            return kHypothesis;
        case ErrorKind::PrecisionExhausted:
        case ErrorKind::TailNotConverged:
        case ErrorKind::HalfIntegerAmbiguity:
        case ErrorKind::BudgetExceeded:
            return kPrecision;
        default:
            return kConfig;
    }
}

// ---------------------------------------------------------------- config

struct Config {
    std::string path;
    std::string text;
    json data = json::object();

    bool has(const std::string& k) const { return data.contains(k); }
};

/// TOML subset: `key = value` lines, '#' comments, values in JSON syntax.
inline json parse_toml_subset(const std::string& text) {
    json out = json::object();
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        bool quoted = false;
        for (size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line.resize(i);
                break;
            }
        }
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
        std::string key = line.substr(b, eq - b);
        key.erase(key.find_last_not_of(" \t") + 1);
        std::string val = line.substr(eq + 1);
        if (key.empty()) fail(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": empty key");
        try {
            out[key] = json::parse(val);
        } catch (const json::parse_error& e) {
            fail(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": bad value for '" + key + "'");
        }
    }
    return out;
}

inline Config load_config(const std::string& path) {
    Config c;
    c.path = path;
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::ConfigError, "cannot read config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    c.text = ss.str();
    auto b = c.text.find_first_not_of(" \t\r\n");
    bool is_json = b != std::string::npos && c.text[b] == '{';
    if (is_json) {
        try {
            c.data = json::parse(c.text);
        } catch (const json::parse_error& e) {
            fail(ErrorKind::ConfigError, std::string("malformed JSON in '") + path + "': " + e.what());
        }
    } else {
        c.data = parse_toml_subset(c.text);
    }
    if (!c.data.is_object()) fail(ErrorKind::ConfigError, "config must be an object");
    return c;
}

inline Substitution config_substitution(const Config& c) {
    if (!c.has("alphabet") || !c.has("images")) fail(ErrorKind::ConfigError, "config needs 'alphabet' and 'images'");
    try {
        int m = c.data["alphabet"].get<int>();
        auto imgs = c.data["images"].get<std::vector<std::string>>();
        if (static_cast<int>(imgs.size()) != m)
            fail(ErrorKind::ConfigError, "'images' has " + std::to_string(imgs.size()) + " entries, alphabet is " +
                                             std::to_string(m));
        return Substitution::parse(m, imgs);
    } catch (const json::exception& e) {
        fail(ErrorKind::ConfigError, std::string("bad substitution fields: ") + e.what());
    }
}

/// "self-similar", "unit" or an array of positive rationals ("1/2" or numbers).
inline SuspensionFlow config_flow(const Config& c, const Substitution& z) {
    json r = c.has("roof") ? c.data["roof"] : json("self-similar");
    if (r.is_string()) {
        std::string s = r.get<std::string>();
        if (s == "self-similar" || s == "self_similar") return SuspensionFlow::make_self_similar(z);
        if (s == "unit") return SuspensionFlow::make(z, Roof::unit(z.size()));
        fail(ErrorKind::ConfigError, "unknown roof '" + s + "'");
    }
    if (!r.is_array()) fail(ErrorKind::ConfigError, "roof must be a string or an array");
    std::vector<Rational> q;
    for (const auto& x : r) {
        if (x.is_string()) {
            Rational v;
            try {
                v = Rational(x.get<std::string>());
            } catch (const std::exception&) {
                fail(ErrorKind::ConfigError, "bad roof entry '" + x.get<std::string>() + "'");
            }
            v.canonicalize();
            q.push_back(v);
        } else if (x.is_number_integer()) {
            q.emplace_back(x.get<long>());
        } else {
            fail(ErrorKind::ConfigError, "roof entries must be integers or \"p/q\" strings");
        }
    }
    if (static_cast<int>(q.size()) != z.size()) fail(ErrorKind::ConfigError, "roof needs one entry per letter");
    for (const auto& v : q)
        if (v <= 0) fail(ErrorKind::ConfigError, "roof entries must be positive");
    return SuspensionFlow::make(z, Roof::exact(q));
}

/// Comma-separated integers, leading coefficient first ("1,-1,-3").
inline std::vector<long long> parse_int_list(const std::string& s) {
    std::vector<long long> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        long long v = 0;
        auto b = tok.find_first_not_of(' ');
        if (b == std::string::npos) fail(ErrorKind::ConfigError, "empty entry in '" + s + "'");
        auto [p, ec] = std::from_chars(tok.data() + b, tok.data() + tok.size(), v);
        if (ec != std::errc() || p != tok.data() + tok.size()) fail(ErrorKind::ConfigError, "bad integer '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

inline std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        auto b = tok.find_first_not_of(' ');
        auto e = tok.find_last_not_of(' ');
        if (b == std::string::npos) fail(ErrorKind::ConfigError, "empty entry in '" + s + "'");
        double v = 0;
        auto [p, ec] = std::from_chars(tok.data() + b, tok.data() + e + 1, v);
        if (ec != std::errc() || p != tok.data() + e + 1) fail(ErrorKind::ConfigError, "bad number '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

/// "lo:hi:count" is the half-open grid lo + (hi - lo) i / count, exact rationals.
inline std::vector<Rational> parse_grid(const std::string& s) {
    auto a = s.find(':'), b = s.rfind(':');
    if (a == std::string::npos || a == b) fail(ErrorKind::ConfigError, "grid must be lo:hi:count, got '" + s + "'");
    Rational lo = Frequency::parse(s.substr(0, a)).rational();
    Rational hi = Frequency::parse(s.substr(a + 1, b - a - 1)).rational();
    auto cnt = parse_int_list(s.substr(b + 1));
    if (cnt.size() != 1 || cnt[0] < 0) fail(ErrorKind::ConfigError, "grid count must be >= 0");
    std::vector<Rational> out;
    for (long long i = 0; i < cnt[0]; ++i) {
        Rational v = lo + (hi - lo) * Rational(BigInt(static_cast<long>(i)), BigInt(static_cast<long>(cnt[0])));
        v.canonicalize();
        out.push_back(v);
    }
    return out;
}

/// Polynomial from --poly or the config key "poly".
inline IntPoly resolve_poly(const std::string& flag, const Config* c) {
    std::vector<long long> co;
    if (!flag.empty()) co = parse_int_list(flag);
    else if (c && c->has("poly")) {
        try {
            co = c->data["poly"].get<std::vector<long long>>();
        } catch (const json::exception& e) {
            fail(ErrorKind::ConfigError, std::string("bad 'poly': ") + e.what());
        }
    } else {
        fail(ErrorKind::ConfigError, "no polynomial: pass --poly or set 'poly' in the config");
    }
    if (co.size() < 2 || co[0] != 1) fail(ErrorKind::ConfigError, "polynomial must be monic of degree >= 1");
    return IntPoly::from_high_first(co);
}

// ---------------------------------------------------------------- output

inline std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}
inline std::string fmt(long x) { return std::to_string(x); }
inline std::string fmt(int x) { return std::to_string(x); }
inline std::string fmt(bool x) { return x ? "true" : "false"; }
inline std::string fmt(const BigInt& x) { return x.get_str(); }
inline std::string fmt(const std::string& x) { return x; }
inline std::string fmt(const char* x) { return x; }

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

class Csv {
public:
    explicit Csv(std::vector<std::string> header) : cols_(header.size()) { line(header); }

    template <class... T>
    void row(const T&... v) {
        std::vector<std::string> f{fmt(v)...};
        if (f.size() != cols_) fail(ErrorKind::InvalidArgument, "csv row width mismatch");
        line(f);
        ++rows_;
    }

    const std::string& str() const { return buf_; }
    size_t rows() const { return rows_; }

private:
    void line(const std::vector<std::string>& f) {
        for (size_t i = 0; i < f.size(); ++i) {
            if (i) buf_ += ',';
            buf_ += csv_field(f[i]);
        }
        buf_ += "\r\n";
    }
    size_t cols_;
    size_t rows_ = 0;
    std::string buf_;
};

inline std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    std::ostringstream o;
    o << std::hex << std::setw(16) << std::setfill('0') << h;
    return o.str();
}

struct Run {
    std::string command;
    std::filesystem::path out_dir;
    json params = json::object();
    json constants = json::object();
    json precision = json::object();
    std::string config_text;
    std::string config_path;
    std::vector<std::string> files;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void write(const std::string& name, const std::string& body) {
        std::filesystem::create_directories(out_dir);
        std::ofstream f(out_dir / name, std::ios::binary);
        if (!f) fail(ErrorKind::ConfigError, "cannot write '" + (out_dir / name).string() + "'");
        f << body;
        files.push_back(name);
    }

    void finish(const std::string& status) {
        json m = json::object();
        m["command"] = command;
        m["status"] = status;
        m["library_version"] = kVersion;
        m["config_path"] = config_path;
        m["config_hash"] = config_text.empty() ? "" : "fnv1a64:" + fnv1a_hex(config_text);
        m["parameters"] = params;
        m["precision"] = precision;
        m["constants"] = constants;
        m["outputs"] = files;
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        m["wall_time_seconds"] = secs;
        std::filesystem::create_directories(out_dir);
        std::ofstream f(out_dir / "manifest.json", std::ios::binary);
        f << m.dump(2) << "\n";
    }
};

/// JSON-safe double (non-finite values become strings).
inline json jnum(double x) {
    if (std::isfinite(x)) return x;
    return fmt(x);
}

} // namespace subdyn::cli
