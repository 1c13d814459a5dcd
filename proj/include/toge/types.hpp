#ifndef TOGE_TYPES_HPP
#define TOGE_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace toge {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using VecI = Eigen::VectorXi;

enum class ErrorCode {
    NotDelzant,
    Unbounded,
    EmptyInterior,
    DimensionMismatch,
    Overflow,
    OutsidePolytope,
    TooCloseToBoundary,
    NonConvexAt,
    NewtonDivergence,
    QuadratureNotConverged,
    OutsideLattice,
    BoundaryLatticePoint,
    MissingNormingTable,
    EmptyGrid,
    DegenerateFit,
    SchemaError,
    IoError,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

} // namespace toge

#endif
