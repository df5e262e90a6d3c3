namespace phasegate {}
