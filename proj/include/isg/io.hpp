#ifndef ISG_IO_HPP
#define ISG_IO_HPP

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include <isg/diffraction.hpp>
#include <isg/engraving.hpp>

namespace isg {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Comma-separated, header row, LF line endings.
void write_table(std::ostream& out, const std::vector<std::string>& columns,
                 const Eigen::MatrixXd& table);

/// Header "z,<phi_0>,<phi_1>,..." then one row per depth (z in m, alpha in m^-1).
void write_profile_csv(std::ostream& out, const GratingProfile& profile);

/// Columns: <parameter>,eta,regime,scheme.
void write_curve_csv(std::ostream& out, const EfficiencyCurve& curve);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

} // namespace isg

#endif // ISG_IO_HPP
