#include "rydmed/radial.hpp"

#include <spdlog/spdlog.h>

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace rydmed {

std::uint64_t RadialIntegralCache::hash(const std::string& key)
{
    std::uint64_t hv = 0xcbf29ce484222325ULL;
    for (unsigned char ch : key) {
        hv ^= ch;
        hv *= 0x100000001b3ULL;
    }
    return hv;
}

std::string RadialIntegralCache::default_path()
{
    if (const char* p = std::getenv("RYDMED_CACHE")) return p;
    if (const char* home = std::getenv("HOME")) return std::string(home) + "/.cache/rydmed/radial.cache";
    return "rydmed_radial.cache";
}

RadialIntegralCache::RadialIntegralCache(std::string path) : path_(std::move(path))
{
    std::ifstream in(path_);
    if (!in) return;
    std::string line;
    size_t bad = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::uint64_t kh = 0, bits = 0;
        if (std::sscanf(line.c_str(), "%" SCNx64 " %" SCNx64, &kh, &bits) != 2) {
            ++bad;
            continue;
        }
        double v;
        std::memcpy(&v, &bits, sizeof v);
        data_[kh] = v;
    }
    if (bad) spdlog::warn("radial cache {}: skipped {} malformed records", path_, bad);
}

std::optional<double> RadialIntegralCache::get(const std::string& key) const
{
    auto it = data_.find(hash(key));
    if (it == data_.end()) return std::nullopt;
    return it->second;
}

void RadialIntegralCache::put(const std::string& key, double value)
{
    const auto kh = hash(key);
    if (data_.count(kh)) return;
    data_[kh] = value;
    if (path_.empty()) return;
    std::filesystem::path p(path_);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    const bool fresh = !std::filesystem::exists(p);
    std::ofstream out(path_, std::ios::app);
    if (!out) {
        spdlog::warn("radial cache {} not writable", path_);
        return;
    }
    if (fresh) out << "# rydmed radial cache v1: fnv1a64(key) float64-bits\n";
    std::uint64_t bits;
    std::memcpy(&bits, &value, sizeof bits);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%016" PRIx64 " %016" PRIx64 "\n", kh, bits);
    out << buf;
}

void RadialIntegralCache::clear()
{
    data_.clear();
    if (!path_.empty()) std::filesystem::remove(path_);
}

}  // namespace rydmed
