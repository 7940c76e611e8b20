#pragma once

// Exact differential operators on single-cell polynomial fields. Matrix curl
// and div act row-wise; curlT acts column-wise, curlT s = (curl s^T)^T.

#include "cuboid/field.hpp"

#include <utility>

namespace cuboid {

PolyField grad(const PolyField& field);  // scalar -> vector, vector -> matrix (row = component)
PolyField curl(const PolyField& v);      // vector -> vector

PolyField gradgrad(const PolyField& u);
PolyField curl_rows(const PolyField& sigma);
PolyField curlT(const PolyField& sigma);
PolyField div_rows(const PolyField& tau);
PolyField sym_grad(const PolyField& v);
PolyField curl_curlT(const PolyField& sigma);

PolyField trace_of(const PolyField& sigma);  // scalar xx + yy + zz

/// Residuals of curl sym grad v = 1/2 (grad curl v)^T and
/// curlT sym grad v = 1/2 grad curl v. Both are exactly zero.
std::pair<PolyField, PolyField> check_identity_curl_symgrad(const PolyField& v);

}  // namespace cuboid
