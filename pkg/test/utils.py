import os

long_tests = os.environ.get("ZO_SADOM_LONG_TESTS", "0") == "1"
covtype_path = "covtype.libsvm.binary"
covtype_dimension = 54

# Laplacian spectra and condition numbers of small graphs
ring4_eigenvalues = [0.0, 2.0, 2.0, 4.0]
star5_eigenvalues = [0.0, 1.0, 1.0, 1.0, 5.0]
complete3_eigenvalues = [0.0, 3.0, 3.0]
ring4_chi = 2.0
star5_chi = 5.0
star4_chi = 4.0

# Hyperparameters for mu=1, L=4, chi=2, beta=1/8
hp_mu = 1.0
hp_L = 4.0
hp_chi = 2.0
hp_beta = 0.125
hp_tau2 = 0.5
hp_tau1 = 0.4
hp_eta = 1 / 6
hp_alpha = 0.25
hp_nu = 0.5
hp_vartheta2 = 0.0110485
hp_pi = 0.0078125
hp_theta = 11.3137
hp_varkappa = 0.80812
hp_zeta = 0.5
hp_contraction = 0.994476

# Implicit step with eta=0.5, alpha=1, theta=2, beta=0.25, u=1, v=2
implicit_x = 0.769231
implicit_y = 0.307692

# Second moment bounds of the estimators
tpf_bound_d4 = 11.3137
opf_single_bound_d2 = 8.0
opf_double_bound_d1 = 9.0
bias_bound_d10 = 0.01
