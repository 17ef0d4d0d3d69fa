#ifndef TCURVE_PREPROCESS_HPP
#define TCURVE_PREPROCESS_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace tcurve {

struct Article {
    std::string id;
    std::vector<double> scores;
};

// t-scores grouped by article; the article is the unit of resampling.
// `transformed` marks a sample that has been symmetrized/shifted — the
// transform refuses to run twice and the bootstrap refuses transformed
// input, so the resample-then-transform order cannot be violated.
struct MetaSample {
    std::vector<Article> articles;
    bool transformed = false;

    std::size_t n = 0;  // total score count
    std::size_t m() const { return articles.size(); }

    void recount();
};

struct PreprocessSpec {
    bool symmetrize = true;
    double shift = 1.96;
};

// Read a CSV with header columns `t` and `article_id` (extra columns are
// ignored). Rows with non-finite t raise an error naming the row.
MetaSample load_csv(const std::string& path);

// Symmetrize each score t into the pair (|t|, -|t|), then subtract the
// shift from every score. Symmetrization happens first, always.
MetaSample transform(const MetaSample& sample, const PreprocessSpec& spec);

// Articles whose score count exceeds the cap; advisory, never fatal.
std::vector<std::string> articles_exceeding_cap(const MetaSample& sample, std::size_t cap);

}  // namespace tcurve

#endif
