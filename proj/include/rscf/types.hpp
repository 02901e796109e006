#pragma once

#include <complex>

#include <Eigen/Dense>

namespace rscf {

using Index = Eigen::Index;

template <typename T>
using CMat = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using CVec = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, 1>;
template <typename T>
using RMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using RVec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using MatrixC = CMat<double>;
using VectorC = CVec<double>;
using MatrixR = RMat<double>;
using VectorR = RVec<double>;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace rscf
