"""CM periods, Eisenstein-Kronecker series and Hecke L-values"""
