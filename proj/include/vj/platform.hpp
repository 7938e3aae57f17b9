#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace vj {

enum class Cluster { big, little };

const char* cluster_name(Cluster c);

struct PowerEntry {
    double busy_w = 0.0;
    double idle_w = 0.0; // deep idle; parallel runtimes spin instead (see sim)
};

/// Asymmetric multicore model: two clusters with per-cluster DVFS (every
/// core in a cluster runs at the cluster frequency), linear speed in
/// frequency, and a per-(cluster, frequency) power table.
struct PlatformModel {
    std::string name = "custom";
    int n_big = 4;
    int n_little = 4;
    double perf_big = 2.4;    // work units per second per MHz, times 1000
    double perf_little = 1.0;
    std::vector<int> big_freqs;    // MHz levels
    std::vector<int> little_freqs;
    int big_mhz = 2000;    // current cluster frequencies
    int little_mhz = 1400;
    std::map<std::pair<Cluster, int>, PowerEntry> power;

    // Cost in seconds of handing one task to a worker under a task-parallel
    // runtime. The plain sequential build has no runtime and pays nothing.
    double dispatch_s = 0.0;

    int cores() const { return n_big + n_little; }
    Cluster cluster_of(int core) const { return core < n_big ? Cluster::big : Cluster::little; }
    std::string core_name(int core) const;
    int freq_of(Cluster c) const { return c == Cluster::big ? big_mhz : little_mhz; }
    bool has_freq(Cluster c, int mhz) const;
    void set_freq(Cluster c, int mhz); // ArgError when mhz is not a listed level

    /// Work units per second of one core of the cluster at frequency mhz.
    double speed(Cluster c, int mhz) const;
    double speed(Cluster c) const { return speed(c, freq_of(c)); }

    PowerEntry power_at(Cluster c, int mhz) const; // ArgError when missing
};

/// Default calibrated 4+4 big.LITTLE model (Exynos-like): big at
/// {800,1000,1500,2000} MHz, little at {600,1000,1400} MHz. Busy powers are
/// fitted so one busy big core plus three idling big cores draw 3.0 W and a
/// fully busy chip draws 6.85 W; idle is 0.3 x busy.
PlatformModel odroid_xu4_platform();

/// Symmetric 4-core model (Cortex-A53-like): one "big" cluster at 1400 MHz,
/// no little cluster. Fitted to 2.5 W single-core / 5.5 W all-core draw.
PlatformModel rpi3_platform();

/// "odroid-xu4" or "rpi3"; ArgError otherwise.
PlatformModel platform_preset(const std::string& name);

/// key=value description, '#' comments allowed:
///   cluster.big.cores = 4
///   cluster.big.perf = 2.4
///   cluster.big.freqs = 800, 1000, 1500, 2000
///   cluster.big.freq = 2000
///   power.big.2000 = 1.579, 0.474
///   dispatch_s = 0.004
PlatformModel load_platform(const std::string& path);
std::string serialize_platform(const PlatformModel& p);
void save_platform(const PlatformModel& p, const std::string& path);

} // namespace vj
