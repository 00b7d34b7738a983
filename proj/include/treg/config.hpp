#pragma once

// Flat key-value configuration files with [section] headers, plus parsing
// of regularizer specs like "tr-log:10" as used by the CLI and config
// files.  Lines are `key = value`; '#' and ';' start comments.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "treg/errors.hpp"
#include "treg/potentials.hpp"

namespace treg {

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace detail

class ConfigFile {
  public:
    static ConfigFile parse(std::istream& in, const std::string& origin = "<stream>") {
        ConfigFile cf;
        std::string line, section;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::size_t cut = line.find_first_of("#;");
            if (cut != std::string::npos) line.erase(cut);
            line = detail::trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ConfigError(origin + ":" + std::to_string(lineno) +
                                      ": unterminated section header");
                section = detail::trim(line.substr(1, line.size() - 2));
                continue;
            }
            const std::size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": expected key = value");
            const std::string key = detail::trim(line.substr(0, eq));
            const std::string val = detail::trim(line.substr(eq + 1));
            if (key.empty())
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
            cf.values_[section + "/" + key] = val;
        }
        return cf;
    }

    static ConfigFile parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file " + path);
        return parse(in, path);
    }

    bool has(const std::string& section, const std::string& key) const {
        return values_.count(section + "/" + key) != 0;
    }

    std::string get_string(const std::string& section, const std::string& key) const {
        const auto it = values_.find(section + "/" + key);
        if (it == values_.end())
            throw ConfigError("missing config key [" + section + "] " + key);
        return it->second;
    }

    std::string get_string_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const {
        return has(section, key) ? get_string(section, key) : fallback;
    }

    double get_double(const std::string& section, const std::string& key) const {
        const std::string v = get_string(section, key);
        try {
            std::size_t used = 0;
            const double d = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ConfigError("config key [" + section + "] " + key + ": expected number, got '" +
                              v + "'");
        }
    }

    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const {
        return has(section, key) ? get_double(section, key) : fallback;
    }

    long get_int(const std::string& section, const std::string& key) const {
        const std::string v = get_string(section, key);
        try {
            std::size_t used = 0;
            const long d = std::stol(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ConfigError("config key [" + section + "] " + key + ": expected integer, got '" +
                              v + "'");
        }
    }

    long get_int_or(const std::string& section, const std::string& key, long fallback) const {
        return has(section, key) ? get_int(section, key) : fallback;
    }

    bool get_bool(const std::string& section, const std::string& key) const {
        const std::string v = detail::lower(get_string(section, key));
        if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
        if (v == "false" || v == "no" || v == "0" || v == "off") return false;
        throw ConfigError("config key [" + section + "] " + key + ": expected boolean, got '" + v +
                          "'");
    }

    std::vector<double> get_double_list(const std::string& section, const std::string& key) const {
        const std::string v = get_string(section, key);
        std::vector<double> out;
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = detail::trim(item);
            if (item.empty()) continue;
            try {
                std::size_t used = 0;
                out.push_back(std::stod(item, &used));
                if (used != item.size()) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw ConfigError("config key [" + section + "] " + key +
                                  ": expected comma-separated numbers, got '" + v + "'");
            }
        }
        if (out.empty())
            throw ConfigError("config key [" + section + "] " + key + ": empty list");
        return out;
    }

  private:
    std::map<std::string, std::string> values_;  // "section/key" -> raw string
};

// --- Regularizer specs -----------------------------------------------------
//
// KIND[:params] with an optional "tr-" (or "tr") prefix marking truncation:
//   l1 | tv              total variation potential rho(s) = s
//   l2                   quadratic s^2/2
//   lp:p                 s^p, 0 < p < 1
//   log:theta | ln:theta log(theta s + 1)
//   frac:theta           theta s / (1 + theta s)
//   logp:theta,p         log(theta s^p + 1)
//   fracp:theta,p        theta s^p / (1 + theta s^p)
//   zeroone              0-1 indicator
//   scad:theta[,a]       SCAD (a defaults to 3.7); already flat, never "tr-"
// Truncated kinds take tau from the separate --tau flag / config key.

struct RegSpec {
    PotentialFamily family = PotentialFamily::L1();
    bool truncated = false;
    std::string canonical;  // normalized name, e.g. "tr-l1"
};

inline RegSpec parse_reg_spec(const std::string& text) {
    std::string kind = detail::lower(detail::trim(text));
    std::string params;
    const std::size_t colon = kind.find(':');
    if (colon != std::string::npos) {
        params = kind.substr(colon + 1);
        kind = kind.substr(0, colon);
    }
    // Tolerate "tr-l1", "tr_l1", "trl1".
    std::string flat;
    for (char c : kind)
        if (c != '-' && c != '_') flat.push_back(c);

    RegSpec spec;
    if (flat.rfind("tr", 0) == 0 && flat != "tr") {
        spec.truncated = true;
        flat = flat.substr(2);
    }

    std::vector<double> p;
    if (!params.empty()) {
        std::stringstream ss(params);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = detail::trim(item);
            try {
                std::size_t used = 0;
                p.push_back(std::stod(item, &used));
                if (used != item.size()) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw ConfigError("regularizer '" + text + "': bad parameter '" + item + "'");
            }
        }
    }
    const auto want = [&](std::size_t lo, std::size_t hi, const char* sig) {
        if (p.size() < lo || p.size() > hi)
            throw ConfigError("regularizer '" + text + "': expected parameters " + sig);
    };

    if (flat == "l1" || flat == "tv") {
        want(0, 0, "none");
        spec.family = PotentialFamily::L1();
        spec.canonical = "l1";
    } else if (flat == "l2") {
        want(0, 0, "none");
        spec.family = PotentialFamily::L2();
        spec.canonical = "l2";
    } else if (flat == "lp") {
        want(1, 1, "p");
        spec.family = PotentialFamily::Lp(p[0]);
        spec.canonical = "lp";
    } else if (flat == "log" || flat == "ln") {
        want(1, 1, "theta");
        spec.family = PotentialFamily::Log(p[0]);
        spec.canonical = "log";
    } else if (flat == "frac") {
        want(1, 1, "theta");
        spec.family = PotentialFamily::Frac(p[0]);
        spec.canonical = "frac";
    } else if (flat == "logp") {
        want(2, 2, "theta,p");
        spec.family = PotentialFamily::LogP(p[0], p[1]);
        spec.canonical = "logp";
    } else if (flat == "fracp") {
        want(2, 2, "theta,p");
        spec.family = PotentialFamily::FracP(p[0], p[1]);
        spec.canonical = "fracp";
    } else if (flat == "zeroone" || flat == "01") {
        want(0, 0, "none");
        if (spec.truncated)
            throw ConfigError("regularizer '" + text + "': zeroone is already flat; "
                              "its truncation is itself");
        spec.family = PotentialFamily::ZeroOne();
        spec.canonical = "zeroone";
    } else if (flat == "scad") {
        want(1, 2, "theta[,a]");
        if (spec.truncated)
            throw ConfigError("regularizer '" + text + "': scad is already flat beyond "
                              "a*theta; truncation is not supported");
        spec.family = (p.size() == 2) ? PotentialFamily::Scad(p[0], p[1])
                                      : PotentialFamily::Scad(p[0]);
        spec.canonical = "scad";
    } else {
        throw ConfigError("regularizer '" + text + "': unknown kind");
    }
    if (spec.truncated) spec.canonical = "tr-" + spec.canonical;
    return spec;
}

// Combine a reg spec with the tau flag.  tau must be given exactly for
// truncated kinds (NaN means "not given").
inline TruncatedPotential make_regularizer(const RegSpec& spec, double tau) {
    const bool have_tau = !std::isnan(tau);
    if (spec.truncated) {
        if (!have_tau)
            throw ConfigError("regularizer '" + spec.canonical + "' requires --tau");
        return TruncatedPotential(spec.family, tau);
    }
    if (have_tau)
        throw ConfigError("--tau given but regularizer '" + spec.canonical +
                          "' is not truncated (use the tr- prefix)");
    return TruncatedPotential::untruncated(spec.family);
}

inline TruncatedPotential parse_regularizer(const std::string& text, double tau) {
    return make_regularizer(parse_reg_spec(text), tau);
}

}  // namespace treg
