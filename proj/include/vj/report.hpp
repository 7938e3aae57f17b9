#pragma once

#include <string>
#include <vector>

#include "vj/sim.hpp"

namespace vj {

/// Canonical sweep CSV, header
///   policy,big_mhz,little_mhz,step,scale,makespan_s,joules,avg_w,total_error
/// Pass extra = true to append a windows_scanned column (benchmark sweeps).
std::string sweep_csv(const std::vector<SweepRecord>& records);
std::string sweep_csv_with_windows(const std::vector<SweepRecord>& records,
                                   const std::vector<unsigned long long>& windows);

/// Per-task schedule dump: task,kind placeholder,core,start_s,finish_s.
std::string schedule_csv(const ScheduleResult& s, const PlatformModel& platform);

/// Minimal self-contained scatter plot (axes, points, labels), energy on the
/// y axis against time on the x axis, each point annotated with its
/// total_error. No external plotting dependencies.
std::string svg_scatter(const std::vector<SweepRecord>& records,
                        const std::string& title);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace vj
