#pragma once

#include <memory>
#include <string>

#include "hopfreeb/complex_rational.hpp"
#include "hopfreeb/holonomy.hpp"
#include "hopfreeb/hopf.hpp"

namespace testing_support {

inline hopfreeb::ComplexRational cr(const std::string& re, const std::string& im = "0") {
    return hopfreeb::ComplexRational::parse(re, im);
}

inline hopfreeb::HopfParams params(const std::string& lambda, const std::string& mu, const std::string& tau = "0",
                                   int p = 1) {
    return hopfreeb::validate_params(cr(lambda), cr(mu), cr(tau), p);
}

// The five reference parameter sets, one per case.
inline hopfreeb::HopfParams case1() { return params("2", "2"); }
inline hopfreeb::HopfParams case2() { return params("4", "2"); }
inline hopfreeb::HopfParams case3() { return params("5", "2"); }
inline hopfreeb::HopfParams case4() { return params("2", "2", "1", 1); }
inline hopfreeb::HopfParams case5() { return params("4", "2", "1", 2); }

inline const hopfreeb::HolonomyMap& default_phi() {
    static const hopfreeb::HolonomyMap phi = hopfreeb::make_holonomy(1.0, 1.0, 1.0);
    return phi;
}

inline hopfreeb::TimeFunctionPtr default_time() {
    static const hopfreeb::TimeFunctionPtr tf =
        std::make_shared<const hopfreeb::TimeFunction>(hopfreeb::build_time_function(default_phi(), 0.5, 3));
    return tf;
}

} // namespace testing_support
