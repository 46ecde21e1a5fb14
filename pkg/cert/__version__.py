__title__ = 'cert'
__description__ = 'Expected-cost toolkit for a probabilistic call-by-push-value language'
__url__ = 'https://github.com/harvard-nrg/cert'
__version__ = '0.1.0'
__author__ = 'Neuroinformatics Research Group'
__author_email__ = 'info@neuroinfo.org'
