#pragma once

#include <string>
#include <string_view>

#include "kgt/hamiltonian.hpp"

namespace kgt {

// Shortest decimal text that reads back to the same double.
std::string format_double(double x);
double parse_double(std::string_view s);

// Header "# kgt-hamiltonian sigma=.. r=.. c=.. nmax=.. dmax=.. form=..", then one
// line per term: "re im | a:{n:e,...} b:{...} k:{...} k':{...}".
std::string serialize(const Hamiltonian& h);
Hamiltonian parse_hamiltonian(std::string_view text);

void write_hamiltonian(const std::string& path, const Hamiltonian& h);
Hamiltonian read_hamiltonian(const std::string& path);

}  // namespace kgt
