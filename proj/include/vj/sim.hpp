#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vj/taskgraph.hpp"

namespace vj {

/// Scheduling policies:
///   botlev              two ready queues ordered by bottom level; big cores
///                       prefer critical tasks, little cores only take
///                       non-critical ones
///   fifo_asym           one FIFO ready queue, any idle core pops the head
///   all_cores_fifo      static split: task i is pinned to core i mod cores,
///                       each core runs its tasks in id order (the
///                       schedule(static) parallel baseline)
///   big_only_sequential everything on one big core in id order, without a
///                       task runtime (no dispatch cost, no spinning peers)
enum class Policy { botlev, fifo_asym, big_only_sequential, all_cores_fifo };

const char* policy_name(Policy p);
Policy policy_from_name(const std::string& name); // ArgError on unknown names

struct ScheduledTask {
    int task = -1;
    int core = -1;
    double start = 0.0;
    double finish = 0.0;
};

struct TraceEvent {
    double time = 0.0;
    std::string what;
};

struct ScheduleResult {
    Policy policy = Policy::big_only_sequential;
    int big_mhz = 0;
    int little_mhz = 0;
    std::vector<ScheduledTask> tasks; // indexed by task id
    double makespan = 0.0;
    // Parallel runtimes busy-wait between tasks, so waiting cores burn busy
    // watts; the sequential baseline leaves unused cores in deep idle.
    bool spin_wait = false;
    std::vector<TraceEvent> queue_trace;
};

struct ClusterEnergy {
    double busy_s = 0.0; // summed over cores
    double idle_s = 0.0;
    double busy_j = 0.0;
    double idle_j = 0.0;
};

struct EnergyReport {
    ClusterEnergy big;
    ClusterEnergy little;
    double total_j = 0.0;
    double avg_w = 0.0; // total_j / makespan
    double makespan = 0.0;
};

/// Deterministic discrete-event simulation of one policy on the platform's
/// current frequencies. Identical inputs produce identical traces.
ScheduleResult simulate_schedule(const TaskGraph& g, const PlatformModel& platform,
                                 Policy policy);

/// Bottom-level-aware list scheduling (simulate_schedule with Policy::botlev).
/// `allow_little_critical` lets little cores steal from the critical queue
/// when the non-critical queue is empty (off by default).
ScheduleResult botlev_schedule(const TaskGraph& g, const PlatformModel& platform,
                               bool allow_little_critical = false);

/// Joule accounting of a finished schedule: per cluster, busy seconds times
/// busy watts plus wait seconds times either idle watts (sequential) or busy
/// watts (spinning task runtime). Busy + idle seconds per core always sum to
/// the makespan.
EnergyReport energy_of(const ScheduleResult& s, const PlatformModel& platform);

/// One sweep cell: a (policy, frequency, detector-parameter) configuration
/// with its simulated (or measured) time, energy, and detection error.
struct SweepRecord {
    std::string policy;
    int big_mhz = 0;
    int little_mhz = 0;
    int step = 0;
    double scale = 0.0;
    double makespan_s = 0.0;
    double joules = 0.0;
    double avg_w = 0.0;
    long long total_error = 0;
};

struct DvfsSweepResult {
    std::vector<SweepRecord> records;
    /// Index of the minimum-energy record whose makespan is within
    /// makespan_slack times the best makespan in the sweep; -1 when empty.
    int best_index = -1;
    double makespan_limit = 0.0;
};

/// Simulates every (big frequency, policy) combination at a fixed little
/// frequency and flags the minimum-energy configuration meeting the makespan
/// constraint. Frequencies must be listed platform levels (ArgError).
DvfsSweepResult dvfs_sweep(const TaskGraph& g, const PlatformModel& platform,
                           const std::vector<int>& big_freqs, int little_mhz,
                           const std::vector<Policy>& policies,
                           double makespan_slack = 1.25);

/// Real (non-simulated) parallel detection: runs detector::detect with the
/// requested worker count (0 = hardware concurrency) so measured elapsed
/// times can sit next to simulated makespans in sweep records.
DetectReport parallel_detect_bridge(const GrayImage& img, const Cascade& c,
                                    const DetectParams& p, int workers);

} // namespace vj
