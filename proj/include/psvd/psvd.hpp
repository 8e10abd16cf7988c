#ifndef PSVD_PSVD_HPP
#define PSVD_PSVD_HPP

#include "psvd/analytics.hpp"
#include "psvd/error.hpp"
#include "psvd/fixtures.hpp"
#include "psvd/gram_schmidt.hpp"
#include "psvd/io.hpp"
#include "psvd/jacobi.hpp"
#include "psvd/matrix.hpp"
#include "psvd/power.hpp"
#include "psvd/random.hpp"
#include "psvd/svd.hpp"

#endif  // PSVD_PSVD_HPP
