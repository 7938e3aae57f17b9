#include "vj/platform.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "vj/error.hpp"

namespace vj {

const char* cluster_name(Cluster c) { return c == Cluster::big ? "big" : "little"; }

std::string PlatformModel::core_name(int core) const {
    const Cluster c = cluster_of(core);
    const int idx = c == Cluster::big ? core : core - n_big;
    return std::string(cluster_name(c)) + std::to_string(idx);
}

bool PlatformModel::has_freq(Cluster c, int mhz) const {
    const auto& levels = c == Cluster::big ? big_freqs : little_freqs;
    return std::find(levels.begin(), levels.end(), mhz) != levels.end();
}

void PlatformModel::set_freq(Cluster c, int mhz) {
    if (!has_freq(c, mhz))
        throw ArgError(std::string("frequency ") + std::to_string(mhz) +
                       " MHz is not a level of cluster " + cluster_name(c));
    (c == Cluster::big ? big_mhz : little_mhz) = mhz;
}

double PlatformModel::speed(Cluster c, int mhz) const {
    const double perf = c == Cluster::big ? perf_big : perf_little;
    return perf * static_cast<double>(mhz) * 1000.0; // work units per second
}

PowerEntry PlatformModel::power_at(Cluster c, int mhz) const {
    const auto it = power.find({c, mhz});
    if (it == power.end())
        throw ArgError(std::string("no power table entry for ") + cluster_name(c) + "@" +
                       std::to_string(mhz));
    return it->second;
}

namespace {

constexpr double kIdleRatio = 0.3;
// Busy watts scale with frequency as (f/f_anchor)^kPowerExp.
constexpr double kPowerExp = 1.8;

void fill_power_law(PlatformModel& p, Cluster c, const std::vector<int>& freqs,
                    int anchor_mhz, double anchor_busy_w, double idle_ratio) {
    for (int f : freqs) {
        const double busy =
            anchor_busy_w * std::pow(static_cast<double>(f) / anchor_mhz, kPowerExp);
        p.power[{c, f}] = PowerEntry{busy, busy * idle_ratio};
    }
}

} // namespace

PlatformModel odroid_xu4_platform() {
    PlatformModel p;
    p.name = "odroid-xu4";
    p.n_big = 4;
    p.n_little = 4;
    p.perf_big = 2.4;
    p.perf_little = 1.0;
    p.big_freqs = {800, 1000, 1500, 2000};
    p.little_freqs = {600, 1000, 1400};
    p.big_mhz = 2000;
    p.little_mhz = 1400;
    p.dispatch_s = 0.01;

    // Fitted defaults: one busy big core plus three idling big peers draw
    // 3.0 W (1.9 * busy with idle at 0.3 * busy), and a fully busy chip
    // draws 6.85 W (4 * big_busy + 4 * little_busy).
    const double big_busy = 3.0 / 1.9;
    const double little_busy = (6.85 - 4.0 * big_busy) / 4.0;
    fill_power_law(p, Cluster::big, p.big_freqs, 2000, big_busy, kIdleRatio);
    fill_power_law(p, Cluster::little, p.little_freqs, 1400, little_busy, kIdleRatio);
    return p;
}

PlatformModel rpi3_platform() {
    PlatformModel p;
    p.name = "rpi3";
    p.n_big = 4;
    p.n_little = 0;
    p.perf_big = 1.4;
    p.perf_little = 1.0;
    p.big_freqs = {600, 1000, 1400};
    p.little_freqs = {};
    p.big_mhz = 1400;
    p.little_mhz = 0;
    p.dispatch_s = 0.01;

    // Symmetric 4-core fit: 2.5 W with one busy core, 5.5 W with four.
    const double busy = 5.5 / 4.0;                  // 1.375
    const double idle_ratio = (2.5 - busy) / (3.0 * busy); // 0.2727..
    fill_power_law(p, Cluster::big, p.big_freqs, 1400, busy, idle_ratio);
    return p;
}

PlatformModel platform_preset(const std::string& name) {
    if (name == "odroid-xu4" || name == "odroid" || name == "default")
        return odroid_xu4_platform();
    if (name == "rpi3" || name == "rpi") return rpi3_platform();
    throw ArgError("unknown platform preset '" + name + "' (want odroid-xu4 or rpi3)");
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, delim)) out.push_back(trim(item));
    return out;
}

double parse_double(const std::string& s, long line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad number '" + s + "'", line);
    }
}

int parse_mhz(const std::string& s, long line) {
    const double v = parse_double(s, line);
    if (v < 1 || v != std::floor(v)) throw ParseError("bad frequency '" + s + "'", line);
    return static_cast<int>(v);
}

Cluster parse_cluster(const std::string& s, long line) {
    if (s == "big") return Cluster::big;
    if (s == "little") return Cluster::little;
    throw ParseError("unknown cluster '" + s + "'", line);
}

} // namespace

PlatformModel load_platform(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    PlatformModel p;
    p.n_big = 0;
    p.n_little = 0;
    p.big_freqs.clear();
    p.little_freqs.clear();
    p.power.clear();
    p.name = path;

    std::string raw;
    long line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos) throw ParseError("expected key = value", line);
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        const auto parts = split(key, '.');

        if (key == "name") {
            p.name = value;
        } else if (key == "dispatch_s") {
            p.dispatch_s = parse_double(value, line);
        } else if (parts.size() == 3 && parts[0] == "cluster") {
            const Cluster c = parse_cluster(parts[1], line);
            if (parts[2] == "cores") {
                (c == Cluster::big ? p.n_big : p.n_little) =
                    static_cast<int>(parse_double(value, line));
            } else if (parts[2] == "perf") {
                (c == Cluster::big ? p.perf_big : p.perf_little) = parse_double(value, line);
            } else if (parts[2] == "freqs") {
                auto& levels = c == Cluster::big ? p.big_freqs : p.little_freqs;
                for (const auto& tok : split(value, ',')) levels.push_back(parse_mhz(tok, line));
            } else if (parts[2] == "freq") {
                (c == Cluster::big ? p.big_mhz : p.little_mhz) = parse_mhz(value, line);
            } else {
                throw ParseError("unknown cluster key '" + key + "'", line);
            }
        } else if (parts.size() == 3 && parts[0] == "power") {
            const Cluster c = parse_cluster(parts[1], line);
            const int mhz = parse_mhz(parts[2], line);
            const auto vals = split(value, ',');
            if (vals.size() != 2)
                throw ParseError("power rows need 'busy, idle' watts", line);
            PowerEntry e{parse_double(vals[0], line), parse_double(vals[1], line)};
            if (e.busy_w < e.idle_w || e.idle_w < 0)
                throw ParseError("power row must satisfy busy >= idle >= 0", line);
            p.power[{c, mhz}] = e;
        } else {
            throw ParseError("unknown key '" + key + "'", line);
        }
    }

    if (p.n_big < 1) throw ParseError("platform needs at least one big core");
    if (p.big_freqs.empty()) throw ParseError("platform needs big cluster frequency levels");
    if (!p.has_freq(Cluster::big, p.big_mhz))
        throw ParseError("current big frequency is not a listed level");
    if (p.n_little > 0 && !p.has_freq(Cluster::little, p.little_mhz))
        throw ParseError("current little frequency is not a listed level");
    for (int f : p.big_freqs) p.power_at(Cluster::big, f);
    for (int f : p.little_freqs) p.power_at(Cluster::little, f);
    return p;
}

std::string serialize_platform(const PlatformModel& p) {
    std::ostringstream out;
    out << "name = " << p.name << "\n";
    out << "dispatch_s = " << p.dispatch_s << "\n";
    out << "cluster.big.cores = " << p.n_big << "\n";
    out << "cluster.big.perf = " << p.perf_big << "\n";
    out << "cluster.big.freqs = ";
    for (std::size_t i = 0; i < p.big_freqs.size(); ++i)
        out << (i ? ", " : "") << p.big_freqs[i];
    out << "\n";
    out << "cluster.big.freq = " << p.big_mhz << "\n";
    if (p.n_little > 0) {
        out << "cluster.little.cores = " << p.n_little << "\n";
        out << "cluster.little.perf = " << p.perf_little << "\n";
        out << "cluster.little.freqs = ";
        for (std::size_t i = 0; i < p.little_freqs.size(); ++i)
            out << (i ? ", " : "") << p.little_freqs[i];
        out << "\n";
        out << "cluster.little.freq = " << p.little_mhz << "\n";
    }
    for (const auto& [key, e] : p.power) {
        out << "power." << cluster_name(key.first) << "." << key.second << " = " << e.busy_w
            << ", " << e.idle_w << "\n";
    }
    return out.str();
}

void save_platform(const PlatformModel& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << serialize_platform(p);
}

} // namespace vj
