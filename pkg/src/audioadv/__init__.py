"""audioadv: desk-scale adversarial robustness workbench for 2D audio representations.

Pipeline: waveforms -> STFT/DWT (+ tonnetz) spectrograms -> small
differentiable classifiers -> white/black-box attacks under explicit
budgets -> FGSM adversarial training -> fooling-AUC / perturbation-ratio
reports.
"""

__version__ = "0.1.0"
