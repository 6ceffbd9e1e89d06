#include "rydmed/output.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rydmed {

std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_couplings_csv(std::ostream& os, const CouplingTable& t, bool all_rows)
{
    os << "i,m,J_perp_Hz,J_zz_Hz\n";
    const int c = t.centre;
    for (int i = 0; i < t.n; ++i) {
        if (!all_rows && i != c) continue;
        if (!t.row_done.empty() && !t.row_done[i]) continue;
        for (int m = 0; m < t.n; ++m) {
            if (m == i) continue;
            os << (i - c) << ',' << (m - c) << ',' << fmt_double(t.J_perp(i, m)) << ',' << fmt_double(t.J_zz(i, m))
               << '\n';
        }
    }
}

void write_bfield_csv(std::ostream& os, const CouplingTable& t)
{
    os << "i,b_z_Hz\n";
    for (int i = 0; i < t.n; ++i)
        if (t.row_done.empty() || t.row_done[i]) os << (i - t.centre) << ',' << fmt_double(t.b_z(i)) << '\n';
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows)
{
    os << "kappa0_over_pi_L";
    for (int p = 2; p <= 5; ++p) os << ",ratio_p" << p;
    os << '\n';
    for (const auto& r : rows) {
        os << fmt_double(r.kappa0);
        for (double v : r.ratio) os << ',' << fmt_double(v);
        os << '\n';
    }
}

nlohmann::json make_provenance(const std::string& command, const nlohmann::json& config, const nlohmann::json& extra,
                               bool deterministic)
{
    nlohmann::json j;
    j["tool"] = "rydmed";
    j["command"] = command;
    j["config"] = config;
    j["results"] = extra;
    j["deterministic"] = deterministic;
    if (!deterministic) {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char buf[64];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        j["generated"] = buf;
    }
    return j;
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

void write_json_file(const std::string& path, const nlohmann::json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace rydmed
