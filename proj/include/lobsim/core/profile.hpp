#pragma once

#include <string>
#include <vector>

namespace lobsim {

// Piecewise-linear function on [0,1] given by knots; constant beyond the end
// knots.
class Profile {
public:
    Profile() : Profile(0.0) {}
    explicit Profile(double constant);
    Profile(std::vector<double> xs, std::vector<double> ys);

    static Profile constant(double v) { return Profile(v); }
    // Two-column CSV: position, value. Lines starting with '#' are skipped.
    static Profile from_csv(const std::string& path);
    // "0.3", "0:0.3 0.5:0.1 1:0.05", "csv:path", or "exp:a,s,b" for
    // a*exp(-x/s) + b tabulated on 1001 knots.
    static Profile parse(const std::string& text);

    double operator()(double x) const;
    double min_value() const;
    const std::vector<double>& knots() const { return xs_; }
    const std::vector<double>& values() const { return ys_; }

private:
    std::vector<double> xs_;
    std::vector<double> ys_;
};

} // namespace lobsim
