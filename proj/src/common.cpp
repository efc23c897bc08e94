#include "ats/common.hpp"

namespace ats {

Bounds::Bounds(Eigen::VectorXd lower, Eigen::VectorXd upper) : lo(std::move(lower)), hi(std::move(upper)) {
    if (lo.size() != hi.size()) throw std::invalid_argument("bounds: lower/upper dimension mismatch");
    if (lo.size() == 0) throw std::invalid_argument("bounds: zero-dimensional domain");
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        if (!(lo[i] < hi[i])) throw std::invalid_argument("bounds: need lo < hi in every dimension");
    }
}

Bounds Bounds::unit_cube(Eigen::Index dim) {
    return Bounds(Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim));
}

bool Bounds::contains(const Point& x) const {
    if (x.size() != lo.size()) return false;
    return ((x.array() >= lo.array()) && (x.array() <= hi.array())).all();
}

Point Bounds::clamp(const Point& x) const {
    return x.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace ats
