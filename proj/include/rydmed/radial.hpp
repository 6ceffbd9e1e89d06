#pragma once

#include "rydmed/species.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rydmed {

struct RadialOptions {
    int points = 20000;
    double outer_scale = 2.5;    // r_max = outer_scale * n* (n* + outer_offset)
    double outer_offset = 15.0;
    double hydrogen_core = 1e-5; // r_core used when mu = 0 (n*^{2/3} would cut the 1s orbit)
};

// Radial function on a uniform grid in x = ln r, stored as y = sqrt(r) R(r).
class RadialSolution {
public:
    std::string species;
    int n = 0;
    int l = 0;
    double j = 0.5;
    double mu = 0.0;
    double nstar = 0.0;
    double energy = 0.0;  // a.u.
    double x0 = 0.0;      // ln r_core
    double h = 0.0;
    std::vector<double> y;
    RadialOptions opts;

    size_t size() const { return y.size(); }
    double r(size_t i) const;
    double r_core() const;
    double r_max() const;
    double R(double r) const;  // R_nl(r), zero outside the grid
    double containment(double r_au) const;
    double half_containment_radius() const;
    int nodes() const;
    double outer_turning_point() const;
    std::string key() const;  // canonical parameter string
};

RadialSolution radial_wavefunction(const RydbergLevel& level, const QuantumDefectTable& defects,
                                   const RadialOptions& opts = {});

// Two levels sampled on a common grid with cumulative moment tables.
class RadialPair {
public:
    RadialPair(const RadialSolution& a, const RadialSolution& b);

    // int_{r_core}^{rmax} r^p R_a R_b dr, p in 0..3
    double moment(int power, double rmax = std::numeric_limits<double>::infinity()) const;
    double partial3(double R) const { return moment(3, R); }
    double tail0(double R) const;  // int_R^inf R_a R_b dr
    double dipole() const { return total_[3]; }
    double r_max() const { return std::exp(x0_ + h_ * (fab_.size() - 1)); }
    double r_min() const { return std::exp(x0_); }

private:
    double x0_ = 0.0, h_ = 0.0;
    std::vector<double> fab_;  // y_a y_b
    std::array<std::vector<double>, 4> cum_;
    std::array<double, 4> total_{};
    double partial(int p, double xval) const;
};

// Append-only text cache: one record per line "<fnv1a64 hex> <float64 bits hex>".
class RadialIntegralCache {
public:
    RadialIntegralCache() = default;  // memory only
    explicit RadialIntegralCache(std::string path);

    static std::uint64_t hash(const std::string& key);
    static std::string default_path();

    std::optional<double> get(const std::string& key) const;
    void put(const std::string& key, double value);
    size_t size() const { return data_.size(); }
    const std::string& path() const { return path_; }
    void clear();  // drops memory and removes the file

private:
    std::string path_;
    std::map<std::uint64_t, double> data_;
};

double radial_moment_integral(const RadialSolution& a, const RadialSolution& b, int power,
                              double rmax = std::numeric_limits<double>::infinity(),
                              RadialIntegralCache* cache = nullptr);

double containment_fraction(const RadialSolution& s, double rmax);

}  // namespace rydmed
