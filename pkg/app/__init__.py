# Quantum data-processing inequality toolkit
