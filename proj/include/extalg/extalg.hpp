#ifndef EXTALG_EXTALG_HPP
#define EXTALG_EXTALG_HPP

#include "extalg/error.hpp"
#include "extalg/scalar.hpp"
#include "extalg/metric.hpp"
#include "extalg/multivector.hpp"
#include "extalg/product_table.hpp"
#include "extalg/hodge.hpp"
#include "extalg/spin.hpp"
#include "extalg/expr.hpp"
#include "extalg/jet.hpp"
#include "extalg/manifold.hpp"
#include "extalg/field_model.hpp"
#include "extalg/dirac.hpp"
#include "extalg/io.hpp"
#include "extalg/random.hpp"
#include "extalg/verify.hpp"

#endif  // EXTALG_EXTALG_HPP
