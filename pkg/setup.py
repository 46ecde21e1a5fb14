import os
from setuptools import setup, find_packages

here = os.path.abspath(os.path.dirname(__file__))

requires = [
    'lark',
    'numpy',
    'natsort',
    'arrow',
    'pyaml'
]

test_requirements = [
    'pytest',
    'hypothesis'
]

about = dict()
with open(os.path.join(here, 'cert', '__version__.py'), 'r') as f:
    exec(f.read(), about)

setup(
    name=about['__title__'],
    version=about['__version__'],
    description=about['__description__'],
    author=about['__author__'],
    author_email=about['__author_email__'],
    url=about['__url__'],
    packages=find_packages(exclude=['tests']),
    package_data={
        'cert.corpus': ['corpus.yaml', 'programs/*.cert']
    },
    scripts=[
        'scripts/cert'
    ],
    install_requires=requires,
    tests_require=test_requirements,
    extras_require={
        'test': test_requirements
    }
)
