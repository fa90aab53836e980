from setuptools import setup, find_packages

setup(
    name='nmtrnng',
    version='1.0.0',
    description='Joint neural machine translation and dependency parsing with a recurrent neural network grammar.',
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    packages=find_packages(where='src'),
    package_dir={'': 'src'},
    install_requires=[
        'numpy>=1.21',
        'click>=8.0.1',
        'psutil>=5.9.5',
        'sacrebleu>=2.0',
    ],
    extras_require={
        'test': ['pytest>=6.2.4'],
    },
    entry_points={
        'console_scripts': [
            'nmtrnng=nmtrnng.main:main',
        ],
    },
    classifiers=[
        'Programming Language :: Python :: 3',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
    ],
    python_requires='>=3.8',
)
