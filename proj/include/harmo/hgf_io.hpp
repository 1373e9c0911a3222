#pragma once

#include <iosfwd>
#include <string>

#include "harmo/field.hpp"

namespace harmo {

// HGF-1: one UTF-8 header line
//   HGF1 dim=<n> shape=<a,...> spacing=<h,...> topology=<torus|box> rank=<c,v> origin=<o,...>
// then little-endian float64 payload, node-major then index-row-major.
// R^d-valued fields (immersions) are written with rank=0,d.
void write_hgf(std::ostream& os, const TensorField& f);
void write_hgf(const std::string& path, const TensorField& f);
TensorField read_hgf(std::istream& is);
TensorField read_hgf(const std::string& path);

std::string hgf_header(const TensorField& f);

}  // namespace harmo
