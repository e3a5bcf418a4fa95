#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace sppost {

/// Running sums XᵀX, XᵀY, YᵀY and row count over a stream of row chunks.
/// Chunks can be ingested on different machines or threads and merged;
/// merging in a fixed order gives reproducible sums.
class GramAccumulator {
public:
    explicit GramAccumulator(Eigen::Index p = 0);

    /// Adds rows of X_chunk / Y_chunk. Throws DimensionMismatch on width or
    /// length mismatch; an empty chunk is a no-op.
    void ingest_chunk(const Eigen::Ref<const Eigen::MatrixXd>& X_chunk,
                      const Eigen::Ref<const Eigen::VectorXd>& Y_chunk);

    /// Adds another accumulator's sums into this one.
    void merge(const GramAccumulator& other);

    Eigen::Index p() const noexcept { return p_; }
    std::int64_t count() const noexcept { return count_; }
    const Eigen::MatrixXd& sum_xtx() const noexcept { return sum_xtx_; }
    const Eigen::VectorXd& sum_xty() const noexcept { return sum_xty_; }
    double sum_yy() const noexcept { return sum_yy_; }

private:
    Eigen::Index p_;
    Eigen::MatrixXd sum_xtx_;
    Eigen::VectorXd sum_xty_;
    double sum_yy_ = 0.0;
    std::int64_t count_ = 0;
};

/// Accumulates X, Y in chunks of `chunk_rows` rows on `threads` workers and
/// merges the partial sums in chunk order.
GramAccumulator accumulate_chunked(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                   const Eigen::Ref<const Eigen::VectorXd>& Y,
                                   Eigen::Index chunk_rows, unsigned threads);

}  // namespace sppost
