// SPDX-License-Identifier: Apache-2.0

#pragma once

// Reference evaluations for verification. Probabilities are exact rationals,
// logarithms and sums run at 50 significant digits, and every sum is a plain
// loop over an explicitly materialized alphabet: no region decomposition, no
// kernels, no compensated summation. Slow on purpose.

#include <string>
#include <vector>

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include "trivergence/distribution.hpp"
#include "trivergence/divergence.hpp"
#include "trivergence/trivergence.hpp"

namespace trivergence::verification {

using HighPrecision = boost::multiprecision::mpfr_float_50;
using Rational = boost::multiprecision::mpq_rational;

struct OracleTerm {
    std::string item;
    HighPrecision value;
};

struct OracleValue {
    HighPrecision value;
    /// One entry per item of the evaluation support, in item order.
    std::vector<OracleTerm> term_trace;
    /// Compound forms: the scalar before substitution and whether the 1/T
    /// substitution was taken.
    HighPrecision scalar = 0;
    bool zero_branch = false;

    double to_double() const { return value.convert_to<double>(); }
};

OracleValue kl_direct(const CountDistribution& p, const CountDistribution& q,
                      const SmoothingContext& ctx);

OracleValue js_direct(const CountDistribution& p, const CountDistribution& q,
                      const SmoothingContext& ctx);

/// Sum over a caller-fixed alphabet, mirroring divergence_over().
OracleValue divergence_over_direct(DivergenceKind kind, const CountDistribution& p,
                                   const CountDistribution& q, const SmoothingContext& ctx,
                                   const std::vector<ItemId>& alphabet);

/// Canonically orders the triple, then evaluates the first variant of `form`.
OracleValue trivergence_direct(TrivergenceForm form, DivergenceKind base,
                               const CountDistribution& p, const CountDistribution& q,
                               const CountDistribution& r, const TrivergenceOptions& options = {});

/// Evaluates one composition with fixed roles. Scalar-first compounds throw
/// NotEvaluable, as in the main implementation.
OracleValue variant_direct(const VariantDescriptor& v, DivergenceKind base,
                           const CountDistribution& p, const CountDistribution& q,
                           const CountDistribution& r, const TrivergenceOptions& options = {});

/// |a - b| <= rel·max(|a|, |b|)
bool relatively_close(double kernel_value, const OracleValue& oracle, double rel);

}  // namespace trivergence::verification
