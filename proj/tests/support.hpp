#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "openmax/openmax.hpp"
#include "openmax/synth.hpp"

namespace testsupport {

// Seeded default benchmark, built once per test binary.
inline const openmax::OpenSetBenchmark& default_benchmark() {
    static const openmax::OpenSetBenchmark bench = openmax::make_openset_benchmark(openmax::SynthConfig{}, 7);
    return bench;
}

inline const openmax::OpenMaxModel& default_model() {
    static const openmax::OpenMaxModel model = openmax::fit_openmax(default_benchmark().calibration, {});
    return model;
}

inline openmax::ClassCalibration calibration(std::size_t index, openmax::Vector mav, openmax::WeibullParams w,
                                             std::size_t n = 10) {
    openmax::ClassCalibration cal;
    cal.class_index = index;
    cal.mav = std::move(mav);
    cal.weibull = w;
    cal.n_calibration = n;
    cal.n_tail = n;
    return cal;
}

// Random model with C classes, MAVs in [-3, 3]^C and moderate Weibull params.
inline openmax::OpenMaxModel random_model(std::size_t c, std::mt19937_64& gen,
                                          openmax::OpenMaxConfig config = {}) {
    std::uniform_real_distribution<double> coord(-3.0, 3.0), shape(0.5, 4.0), scale(0.5, 4.0), loc(0.0, 2.0);
    std::vector<openmax::ClassCalibration> cals;
    for (std::size_t k = 0; k < c; ++k) {
        openmax::Vector mav(c);
        for (auto& v : mav) v = coord(gen);
        cals.push_back(calibration(k, mav, {shape(gen), scale(gen), loc(gen)}));
    }
    return openmax::OpenMaxModel(openmax::LabelSpace::with_default_names(c), std::move(cals), config);
}

inline openmax::Vector random_vector(std::size_t n, std::mt19937_64& gen, double lo = -6.0, double hi = 6.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    openmax::Vector v(n);
    for (auto& x : v) x = d(gen);
    return v;
}

}  // namespace testsupport
