#include "pvsmooth/lp/problem.hpp"
#include "pvsmooth/lp/simplex.hpp"

namespace pvsmooth::lp {

template class LpProblem<double>;
template class ProblemBuilder<double>;
template LpSolution<double> solve<double>(const LpProblem<double>&, const SolverOptions&);

} // namespace pvsmooth::lp
