# Robust L1 Regression Lab
