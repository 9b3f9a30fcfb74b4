#ifndef WIPLAB_CSV_HPP_
#define WIPLAB_CSV_HPP_

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wiplab
{

// Rows of doubles with optional '#' comment lines and one header row.
// Doubles are printed with %.17g so a round trip is value-exact.
void write_csv(const std::string & path, const std::vector<std::string> & comments,
               const std::vector<std::string> & columns, const Eigen::MatrixXd & rows);

// Skips comments and the header row.
Eigen::MatrixXd read_csv(const std::string & path);

std::string format_double(double v);

}  // namespace wiplab

#endif  // WIPLAB_CSV_HPP_
