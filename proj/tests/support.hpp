// Shared helpers for the unit tests: seeded random draws and small oracles.
#pragma once

#include <cmath>
#include <random>

#include "qcr/math.hpp"

namespace qcr::test {

class Random {
public:
    explicit Random(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

    Vec3 vec(double scale = 1.0) { return Vec3(uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)); }

    Rotation rotation() {
        Eigen::Vector4d q(normal(), normal(), normal(), normal());
        q.normalize();
        return Rotation::project(Eigen::Quaterniond(q[0], q[1], q[2], q[3]).toRotationMatrix());
    }

    double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

inline double max_abs(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }


}  // namespace qcr::test
