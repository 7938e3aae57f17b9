#include "vj/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <sstream>
#include <thread>

#include "vj/error.hpp"

namespace vj {

const char* policy_name(Policy p) {
    switch (p) {
        case Policy::botlev: return "botlev";
        case Policy::fifo_asym: return "fifo_asym";
        case Policy::big_only_sequential: return "big_only_sequential";
        case Policy::all_cores_fifo: return "all_cores_fifo";
    }
    return "?";
}

Policy policy_from_name(const std::string& name) {
    if (name == "botlev") return Policy::botlev;
    if (name == "fifo_asym") return Policy::fifo_asym;
    if (name == "big_only_sequential") return Policy::big_only_sequential;
    if (name == "all_cores_fifo") return Policy::all_cores_fifo;
    throw ArgError("unknown policy '" + name +
                   "' (want botlev, fifo_asym, big_only_sequential or all_cores_fifo)");
}

namespace {

// Ready-queue entry ordered by descending bottom level, ties by id.
struct ByBottomLevel {
    const std::vector<double>* bl;
    bool operator()(int a, int b) const {
        if ((*bl)[a] != (*bl)[b]) return (*bl)[a] < (*bl)[b]; // max-heap on bl
        return a > b;                                         // then min id first
    }
};

struct Simulator {
    const TaskGraph& g;
    const PlatformModel& platform;
    Policy policy;
    bool allow_little_critical = false;

    std::vector<double> bl;          // botlev only
    std::vector<char> critical;      // botlev marking per task
    std::vector<int> pending;        // unmet dependency count
    std::vector<char> done;
    std::vector<char> started;
    ScheduleResult result;

    // Ready structures. botlev keeps two bl-ordered heaps, fifo_asym one
    // arrival-ordered queue, the sequential baseline an id-ordered heap, and
    // the static policy per-core id-ordered lists.
    std::vector<int> ready_critical;
    std::vector<int> ready_other;
    std::deque<int> ready_fifo;
    std::priority_queue<int, std::vector<int>, std::greater<>> ready_minid;
    std::vector<std::vector<int>> pinned;    // all_cores_fifo: tasks per core
    std::vector<std::size_t> pinned_next;    // per-core cursor
    std::vector<char> ready_flag;

    // Running state: task per core (-1 idle) and a (finish, core) min-heap.
    std::vector<int> running;
    using Completion = std::pair<double, int>;
    std::priority_queue<Completion, std::vector<Completion>, std::greater<>> completions;

    Simulator(const TaskGraph& graph, const PlatformModel& plat, Policy pol)
        : g(graph), platform(plat), policy(pol) {}

    double exec_time(int task, Cluster c) const {
        const double dispatch =
            policy == Policy::big_only_sequential ? 0.0 : platform.dispatch_s;
        return g.nodes[task].work / platform.speed(c) + dispatch;
    }

    void trace(double t, const std::string& what) {
        result.queue_trace.push_back(TraceEvent{t, what});
    }

    void enqueue_batch(double t, const std::vector<int>& batch) {
        if (batch.empty()) return;
        if (policy == Policy::botlev) {
            // A task is critical iff its bottom level ties the maximum over
            // everything ready (queued plus this batch) at its enqueue instant.
            double max_bl = 0.0;
            bool any = false;
            for (int id : ready_critical) {
                max_bl = any ? std::max(max_bl, bl[id]) : bl[id];
                any = true;
            }
            for (int id : ready_other) {
                max_bl = any ? std::max(max_bl, bl[id]) : bl[id];
                any = true;
            }
            for (int id : batch) {
                max_bl = any ? std::max(max_bl, bl[id]) : bl[id];
                any = true;
            }
            const ByBottomLevel cmp{&bl};
            for (int id : batch) {
                critical[id] = bl[id] == max_bl;
                auto& heap = critical[id] ? ready_critical : ready_other;
                heap.push_back(id);
                std::push_heap(heap.begin(), heap.end(), cmp);
                trace(t, "ready task " + std::to_string(id) +
                             (critical[id] ? " critical" : " non-critical"));
            }
        } else {
            for (int id : batch) {
                ready_flag[id] = 1;
                if (policy == Policy::fifo_asym) ready_fifo.push_back(id);
                if (policy == Policy::big_only_sequential) ready_minid.push(id);
                trace(t, "ready task " + std::to_string(id));
            }
        }
    }

    int pick_task_for_core(int core) {
        const Cluster c = platform.cluster_of(core);
        const ByBottomLevel cmp{&bl};
        switch (policy) {
            case Policy::botlev: {
                const bool may_take_critical = c == Cluster::big || allow_little_critical;
                auto pop = [&](std::vector<int>& heap) {
                    std::pop_heap(heap.begin(), heap.end(), cmp);
                    const int id = heap.back();
                    heap.pop_back();
                    return id;
                };
                if (c == Cluster::big && !ready_critical.empty()) return pop(ready_critical);
                if (!ready_other.empty()) return pop(ready_other);
                if (may_take_critical && c == Cluster::little && !ready_critical.empty())
                    return pop(ready_critical);
                return -1;
            }
            case Policy::fifo_asym: {
                if (ready_fifo.empty()) return -1;
                const int id = ready_fifo.front();
                ready_fifo.pop_front();
                return id;
            }
            case Policy::big_only_sequential: {
                if (core != 0 || ready_minid.empty()) return -1;
                const int id = ready_minid.top(); // program (id) order
                ready_minid.pop();
                return id;
            }
            case Policy::all_cores_fifo: {
                auto& cursor = pinned_next[core];
                const auto& mine = pinned[core];
                if (cursor >= mine.size()) return -1;
                const int id = mine[cursor];
                if (!ready_flag[id]) return -1; // next pinned task not ready yet
                ++cursor;
                return id;
            }
        }
        return -1;
    }

    ScheduleResult run() {
        g.validate();
        const int cores = platform.cores();
        if (platform.n_big < 1) throw ArgError("simulate_schedule: need at least one big core");
        const std::size_t n = g.nodes.size();

        result.policy = policy;
        result.big_mhz = platform.big_mhz;
        result.little_mhz = platform.little_mhz;
        result.spin_wait = policy != Policy::big_only_sequential;
        result.tasks.assign(n, ScheduledTask{});

        pending.assign(n, 0);
        done.assign(n, 0);
        started.assign(n, 0);
        ready_flag.assign(n, 0);
        critical.assign(n, 0);
        running.assign(cores, -1);
        for (const TaskNode& node : g.nodes) pending[node.id] = static_cast<int>(node.deps.size());

        if (policy == Policy::botlev)
            bl = bottom_levels(g, platform, platform.big_mhz);
        if (policy == Policy::all_cores_fifo) {
            pinned.assign(cores, {});
            pinned_next.assign(cores, 0);
            for (const TaskNode& node : g.nodes)
                pinned[node.id % cores].push_back(node.id);
        }

        const auto succ = g.successors();
        std::vector<int> batch;
        for (const TaskNode& node : g.nodes)
            if (node.deps.empty()) batch.push_back(node.id);
        double now = 0.0;
        enqueue_batch(now, batch);

        std::size_t completed = 0;
        for (;;) {
            // Hand tasks to idle cores, big cores first.
            for (int core = 0; core < cores; ++core) {
                if (running[core] != -1) continue;
                const int id = pick_task_for_core(core);
                if (id == -1) continue;
                const Cluster c = platform.cluster_of(core);
                const double finish = now + exec_time(id, c);
                running[core] = id;
                started[id] = 1;
                result.tasks[id] = ScheduledTask{id, core, now, finish};
                completions.emplace(finish, core);
                trace(now, "start task " + std::to_string(id) + " on " + platform.core_name(core));
            }

            if (completed == n) break;
            if (completions.empty())
                throw GraphError("simulation stalled with unfinished tasks");

            // Advance to the next completion instant and retire everything
            // finishing then, in core order for determinism.
            now = completions.top().first;
            batch.clear();
            while (!completions.empty() && completions.top().first == now) {
                const auto [t, core] = completions.top();
                completions.pop();
                const int id = running[core];
                running[core] = -1;
                done[id] = 1;
                ++completed;
                result.makespan = std::max(result.makespan, t);
                trace(t, "finish task " + std::to_string(id));
                for (int s : succ[id]) {
                    if (--pending[s] == 0) batch.push_back(s);
                }
            }
            std::sort(batch.begin(), batch.end());
            enqueue_batch(now, batch);
        }
        return std::move(result);
    }
};

} // namespace

ScheduleResult simulate_schedule(const TaskGraph& g, const PlatformModel& platform,
                                 Policy policy) {
    Simulator sim(g, platform, policy);
    return sim.run();
}

ScheduleResult botlev_schedule(const TaskGraph& g, const PlatformModel& platform,
                               bool allow_little_critical) {
    Simulator sim(g, platform, Policy::botlev);
    sim.allow_little_critical = allow_little_critical;
    return sim.run();
}

EnergyReport energy_of(const ScheduleResult& s, const PlatformModel& platform) {
    EnergyReport r;
    r.makespan = s.makespan;
    if (s.tasks.empty() && s.makespan == 0.0) return r;

    double busy_big = 0.0, busy_little = 0.0;
    for (const ScheduledTask& t : s.tasks) {
        if (t.core < 0) continue;
        const double d = t.finish - t.start;
        if (platform.cluster_of(t.core) == Cluster::big)
            busy_big += d;
        else
            busy_little += d;
    }

    auto fill = [&](ClusterEnergy& e, Cluster c, int n_cores, double busy_s, int mhz) {
        if (n_cores == 0) return;
        const PowerEntry p = platform.power_at(c, mhz);
        e.busy_s = busy_s;
        e.idle_s = n_cores * s.makespan - busy_s;
        e.busy_j = busy_s * p.busy_w;
        // A spinning task runtime burns busy watts while waiting; the plain
        // sequential baseline leaves unused cores in deep idle.
        e.idle_j = e.idle_s * (s.spin_wait ? p.busy_w : p.idle_w);
    };
    fill(r.big, Cluster::big, platform.n_big, busy_big, s.big_mhz);
    fill(r.little, Cluster::little, platform.n_little, busy_little, s.little_mhz);

    r.total_j = r.big.busy_j + r.big.idle_j + r.little.busy_j + r.little.idle_j;
    r.avg_w = s.makespan > 0.0 ? r.total_j / s.makespan : 0.0;
    return r;
}

DvfsSweepResult dvfs_sweep(const TaskGraph& g, const PlatformModel& platform,
                           const std::vector<int>& big_freqs, int little_mhz,
                           const std::vector<Policy>& policies, double makespan_slack) {
    if (big_freqs.empty() || policies.empty())
        throw ArgError("dvfs_sweep: need at least one frequency and one policy");
    for (int f : big_freqs)
        if (!platform.has_freq(Cluster::big, f))
            throw ArgError("dvfs_sweep: " + std::to_string(f) + " MHz is not a big-cluster level");
    PlatformModel p = platform;
    if (p.n_little > 0) p.set_freq(Cluster::little, little_mhz);

    DvfsSweepResult out;
    for (int f : big_freqs) {
        p.set_freq(Cluster::big, f);
        for (Policy pol : policies) {
            const ScheduleResult s = simulate_schedule(g, p, pol);
            const EnergyReport e = energy_of(s, p);
            SweepRecord rec;
            rec.policy = policy_name(pol);
            rec.big_mhz = f;
            rec.little_mhz = p.n_little > 0 ? little_mhz : 0;
            rec.step = g.step;
            rec.scale = g.scale_factor;
            rec.makespan_s = s.makespan;
            rec.joules = e.total_j;
            rec.avg_w = e.avg_w;
            out.records.push_back(std::move(rec));
        }
    }

    double best_makespan = out.records.front().makespan_s;
    for (const SweepRecord& r : out.records) best_makespan = std::min(best_makespan, r.makespan_s);
    out.makespan_limit = makespan_slack * best_makespan;
    for (std::size_t i = 0; i < out.records.size(); ++i) {
        const SweepRecord& r = out.records[i];
        if (r.makespan_s > out.makespan_limit) continue;
        if (out.best_index < 0 || r.joules < out.records[out.best_index].joules)
            out.best_index = static_cast<int>(i);
    }
    return out;
}

DetectReport parallel_detect_bridge(const GrayImage& img, const Cascade& c,
                                    const DetectParams& p, int workers) {
    if (workers == 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        workers = hw > 0 ? static_cast<int>(hw) : 1;
    }
    return detect(img, c, p, workers);
}

} // namespace vj
