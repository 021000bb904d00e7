from setuptools import setup, find_packages

with open("README.md", "r") as fh:
    long_description = fh.read()

with open('requirements.txt') as f:
    install_requires = f.read().strip().split('\n')

setup(name='salientcodec',
      description='Saliency-driven hierarchical neural image codec for machine vision',
      long_description=long_description,
      long_description_content_type="text/markdown",
      version='0.1.0',
      packages=find_packages(exclude=('tests', 'tests.*')),
      install_requires=install_requires,
      extras_require={'test': ['pytest>=6.0']},
      entry_points={'console_scripts': ['salientcodec=salientcodec.cli:main']},
      python_requires='>=3.7')
