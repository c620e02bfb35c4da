#ifndef DYNASTRIDE_SIMILARITY_HPP
#define DYNASTRIDE_SIMILARITY_HPP

#include "dynastride/types.hpp"

namespace dynastride {

// cos(u, v) = <u, v> / (||u|| * ||v||), computed in double precision.
// Returns 0.0 when either norm is zero (degenerate embeddings must not
// abort a batch run). Throws ConfigError on dimension mismatch.
double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v);

// Same convention on raw spans; shared by the metric kernels.
double cosine_similarity(const std::vector<double>& u, const std::vector<double>& v);

}  // namespace dynastride

#endif  // DYNASTRIDE_SIMILARITY_HPP
