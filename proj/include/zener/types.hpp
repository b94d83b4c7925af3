// types.hpp
// Common Eigen aliases used across the library.

#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace zener {

template<typename T> using Vec2   = Eigen::Matrix<T, 2, 1>;
template<typename T> using Mat2   = Eigen::Matrix<T, 2, 2>;
template<typename T> using DynVec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template<typename T> using DynMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template<typename T> using SpMat  = Eigen::SparseMatrix<T>;
template<typename T> using Trip   = Eigen::Triplet<T>;

} // namespace zener
