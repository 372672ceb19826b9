# engine package: special functions, measures, functionals and transforms
