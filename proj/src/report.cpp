#include "vj/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "vj/error.hpp"

namespace vj {

namespace {

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

void append_record(std::ostringstream& out, const SweepRecord& r) {
    out << r.policy << "," << r.big_mhz << "," << r.little_mhz << "," << r.step << ","
        << fmt(r.scale) << "," << fmt(r.makespan_s) << "," << fmt(r.joules) << ","
        << fmt(r.avg_w) << "," << r.total_error;
}

} // namespace

std::string sweep_csv(const std::vector<SweepRecord>& records) {
    std::ostringstream out;
    out << "policy,big_mhz,little_mhz,step,scale,makespan_s,joules,avg_w,total_error\n";
    for (const SweepRecord& r : records) {
        append_record(out, r);
        out << "\n";
    }
    return out.str();
}

std::string sweep_csv_with_windows(const std::vector<SweepRecord>& records,
                                   const std::vector<unsigned long long>& windows) {
    if (windows.size() != records.size())
        throw ArgError("sweep_csv_with_windows: column length mismatch");
    std::ostringstream out;
    out << "policy,big_mhz,little_mhz,step,scale,makespan_s,joules,avg_w,total_error,"
           "windows_scanned\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        append_record(out, records[i]);
        out << "," << windows[i] << "\n";
    }
    return out.str();
}

std::string schedule_csv(const ScheduleResult& s, const PlatformModel& platform) {
    std::ostringstream out;
    out << "task,core,start_s,finish_s\n";
    for (const ScheduledTask& t : s.tasks) {
        if (t.core < 0) continue;
        out << t.task << "," << platform.core_name(t.core) << "," << fmt(t.start) << ","
            << fmt(t.finish) << "\n";
    }
    return out.str();
}

std::string svg_scatter(const std::vector<SweepRecord>& records, const std::string& title) {
    constexpr int kW = 640, kH = 440;
    constexpr int kL = 70, kR = 30, kT = 50, kB = 60; // margins

    double x_max = 1e-9, y_max = 1e-9;
    for (const SweepRecord& r : records) {
        x_max = std::max(x_max, r.makespan_s);
        y_max = std::max(y_max, r.joules);
    }
    x_max *= 1.08;
    y_max *= 1.08;

    auto px = [&](double x) { return kL + x / x_max * (kW - kL - kR); };
    auto py = [&](double y) { return kH - kB - y / y_max * (kH - kT - kB); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
        << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
    out << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
        << title << "</text>\n";
    // axes
    out << "<line x1=\"" << kL << "\" y1=\"" << kH - kB << "\" x2=\"" << kW - kR << "\" y2=\""
        << kH - kB << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kL << "\" y1=\"" << kT << "\" x2=\"" << kL << "\" y2=\"" << kH - kB
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"" << kH - 16
        << "\" text-anchor=\"middle\" font-size=\"12\">time (s)</text>\n";
    out << "<text x=\"18\" y=\"" << (kT + kH - kB) / 2
        << "\" font-size=\"12\" transform=\"rotate(-90 18 " << (kT + kH - kB) / 2
        << ")\" text-anchor=\"middle\">energy (J)</text>\n";
    // ticks
    for (int i = 0; i <= 4; ++i) {
        const double xv = x_max * i / 4.0, yv = y_max * i / 4.0;
        out << "<line x1=\"" << px(xv) << "\" y1=\"" << kH - kB << "\" x2=\"" << px(xv)
            << "\" y2=\"" << kH - kB + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px(xv) << "\" y=\"" << kH - kB + 18
            << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt(xv) << "</text>\n";
        out << "<line x1=\"" << kL - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << kL << "\" y2=\""
            << py(yv) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << kL - 8 << "\" y=\"" << py(yv) + 4
            << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(yv) << "</text>\n";
    }
    // points labelled with total_error
    for (const SweepRecord& r : records) {
        const double x = px(r.makespan_s), y = py(r.joules);
        out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"4\" fill=\"steelblue\"/>\n";
        out << "<text x=\"" << x + 6 << "\" y=\"" << y - 6 << "\" font-size=\"10\">s" << r.step
            << "/x" << fmt(r.scale) << " e=" << r.total_error << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
    if (!out) throw IoError("short write to '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace vj
