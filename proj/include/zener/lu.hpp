// lu.hpp
// Direct sparse LU used by the saddle-point solves. The multifrontal UMFPACK
// backend keeps fill-in (and so memory) much lower on the larger meshes; the
// Eigen supernodal factorization is the portable fallback.

#pragma once

#include <type_traits>

#include <Eigen/SparseLU>
#ifdef ZENER_WITH_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include "zener/types.hpp"

namespace zener {

template<typename T>
class DirectLU {
  public:
    void compute(const SpMat<T>& A) { m_impl.compute(A); }
    bool ok() const { return m_impl.info() == Eigen::Success; }
    DynVec<T> solve(const DynVec<T>& b) const { return m_impl.solve(b); }

  private:
#ifdef ZENER_WITH_UMFPACK
    using Impl = std::conditional_t<std::is_same_v<T, double>,
                                    Eigen::UmfPackLU<SpMat<double>>,
                                    Eigen::SparseLU<SpMat<T>>>;
#else
    using Impl = Eigen::SparseLU<SpMat<T>>;
#endif
    Impl m_impl;
};

} // namespace zener
