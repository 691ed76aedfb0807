// Text format for user-defined polynomial families.
//
//   # comment
//   name my-map
//   description free text up to the end of the line
//   component 1
//   i j k coeff          coeff * x^i y^j mu^k, coeff = p, p/q or a decimal
//   component 2
//   ...
//   inverse 1            optional closed-form inverse, same layout
//   inverse 2
#pragma once

#include <string>
#include <vector>

#include "seplab/map_family.hpp"

namespace seplab {

class MapFileError : public MapError {
 public:
  MapFileError(int line, int col, const std::string& msg);
  int line() const { return line_; }
  int column() const { return col_; }

 private:
  int line_, col_;
};

PolyMapFamily parse_map_text(const std::string& text, const std::string& source_name = "<input>");
PolyMapFamily load_map_file(const std::string& path);
std::string format_map_text(const PolyMapFamily& f);

// Structural checks of a family: fixed point at the origin, unit Jacobian
// determinant as a series identity, trace -1 / det 1 of the linear part at
// mu = 0.  Returns human-readable violations (empty when all hold).
std::vector<std::string> check_family_invariants(const PolyMapFamily& f, const PrecisionContext& ctx);

}  // namespace seplab
