#include "sppost/gram.hpp"

#include "sppost/errors.hpp"
#include "sppost/parallel.hpp"

#include <string>
#include <vector>

namespace sppost {

GramAccumulator::GramAccumulator(Eigen::Index p)
    : p_(p), sum_xtx_(Eigen::MatrixXd::Zero(p, p)), sum_xty_(Eigen::VectorXd::Zero(p)) {}

void GramAccumulator::ingest_chunk(const Eigen::Ref<const Eigen::MatrixXd>& X_chunk,
                                   const Eigen::Ref<const Eigen::VectorXd>& Y_chunk) {
    if (X_chunk.rows() == 0 && Y_chunk.size() == 0) return;
    if (X_chunk.cols() != p_) {
        throw Error(ErrorKind::DimensionMismatch, "chunk has " + std::to_string(X_chunk.cols()) +
                                                      " columns, expected " + std::to_string(p_));
    }
    if (X_chunk.rows() != Y_chunk.size()) {
        throw Error(ErrorKind::DimensionMismatch, "chunk rows and response length differ");
    }
    sum_xtx_.noalias() += X_chunk.transpose() * X_chunk;
    sum_xty_.noalias() += X_chunk.transpose() * Y_chunk;
    sum_yy_ += Y_chunk.squaredNorm();
    count_ += X_chunk.rows();
}

void GramAccumulator::merge(const GramAccumulator& other) {
    if (other.p_ != p_) throw Error(ErrorKind::DimensionMismatch, "cannot merge different p");
    sum_xtx_ += other.sum_xtx_;
    sum_xty_ += other.sum_xty_;
    sum_yy_ += other.sum_yy_;
    count_ += other.count_;
}

GramAccumulator accumulate_chunked(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                   const Eigen::Ref<const Eigen::VectorXd>& Y,
                                   Eigen::Index chunk_rows, unsigned threads) {
    if (chunk_rows < 1) throw Error(ErrorKind::InvalidArgument, "chunk_rows must be >= 1");
    if (X.rows() != Y.size()) {
        throw Error(ErrorKind::DimensionMismatch, "X rows and Y length differ");
    }
    const Eigen::Index chunks = (X.rows() + chunk_rows - 1) / chunk_rows;
    std::vector<GramAccumulator> partial(static_cast<std::size_t>(chunks),
                                         GramAccumulator(X.cols()));
    parallel_for(partial.size(), threads, [&](std::size_t c) {
        const Eigen::Index begin = static_cast<Eigen::Index>(c) * chunk_rows;
        const Eigen::Index rows = std::min(chunk_rows, X.rows() - begin);
        partial[c].ingest_chunk(X.middleRows(begin, rows), Y.segment(begin, rows));
    });
    GramAccumulator total(X.cols());
    for (const auto& part : partial) total.merge(part);
    return total;
}

}  // namespace sppost
