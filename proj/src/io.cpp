#include <isg/io.hpp>

#include <array>
#include <charconv>

#include <openssl/evp.h>

namespace isg {

std::string format_double(double value)
{
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

void write_table(std::ostream& out, const std::vector<std::string>& columns,
                 const Eigen::MatrixXd& table)
{
    if (static_cast<Eigen::Index>(columns.size()) != table.cols()) {
        throw domain_error("column names do not match the table width");
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
        out << (c ? "," : "") << columns[c];
    }
    out << '\n';
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
        for (Eigen::Index j = 0; j < table.cols(); ++j) {
            out << (j ? "," : "") << format_double(table(i, j));
        }
        out << '\n';
    }
}

void write_profile_csv(std::ostream& out, const GratingProfile& profile)
{
    out << 'z';
    for (int k = 0; k < profile.grid.size(); ++k) {
        out << ',' << format_double(profile.grid.phi(k));
    }
    out << '\n';
    for (Eigen::Index i = 0; i < profile.alpha.rows(); ++i) {
        out << format_double(profile.z(i));
        for (Eigen::Index k = 0; k < profile.alpha.cols(); ++k) {
            out << ',' << format_double(profile.alpha(i, k));
        }
        out << '\n';
    }
}

void write_curve_csv(std::ostream& out, const EfficiencyCurve& curve)
{
    out << curve.parameter << ",eta,regime,scheme\n";
    for (std::size_t i = 0; i < curve.x.size(); ++i) {
        out << format_double(curve.x[i]) << ',' << format_double(curve.eta[i]) << ','
            << regime_name(curve.regime) << ',' << curve.scheme << '\n';
    }
}

std::string sha256_hex(std::string_view bytes)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw error("SHA-256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

} // namespace isg
